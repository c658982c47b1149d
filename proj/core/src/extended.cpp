#include "nehari/extended.hpp"

#include <stdexcept>

namespace nehari {

double Extended::value() const {
  if (kind_ != Kind::Finite) {
    throw std::logic_error("Extended::value() on a sentinel (" + tag() + "): " + reason_);
  }
  return value_;
}

std::string Extended::tag() const {
  switch (kind_) {
    case Kind::Finite:
      return "finite";
    case Kind::PlusInfinity:
      return "+inf";
    case Kind::MinusInfinity:
      return "-inf";
  }
  return "finite";
}

bool extended_less_equal(const Extended& a, const Extended& b) {
  if (a.kind() == Extended::Kind::MinusInfinity || b.kind() == Extended::Kind::PlusInfinity) {
    return true;
  }
  if (a.kind() == Extended::Kind::PlusInfinity || b.kind() == Extended::Kind::MinusInfinity) {
    return false;
  }
  return a.value() <= b.value();
}

}  // namespace nehari
