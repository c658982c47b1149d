#pragma once

#include <optional>
#include <string>
#include <utility>

namespace nehari {

/// A real number or a tagged infinite sentinel.
///
/// Thresholds are infima/suprema over sets that may be empty or unbounded.
/// The sentinel is carried as a tag with a human-readable reason and is never
/// encoded as a floating-point infinity, so callers must branch on it.
class Extended {
 public:
  enum class Kind { Finite, PlusInfinity, MinusInfinity };

  static Extended finite(double v) { return Extended(Kind::Finite, v, {}); }
  static Extended plus_infinity(std::string reason) {
    return Extended(Kind::PlusInfinity, 0.0, std::move(reason));
  }
  static Extended minus_infinity(std::string reason) {
    return Extended(Kind::MinusInfinity, 0.0, std::move(reason));
  }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  /// Throws std::logic_error on a sentinel.
  double value() const;
  std::optional<double> as_optional() const {
    return is_finite() ? std::optional<double>(value_) : std::nullopt;
  }
  const std::string& reason() const { return reason_; }

  /// "finite", "+inf" or "-inf".
  std::string tag() const;

  friend bool operator==(const Extended& a, const Extended& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

 private:
  Extended(Kind k, double v, std::string r) : kind_(k), value_(v), reason_(std::move(r)) {}

  Kind kind_;
  double value_;
  std::string reason_;
};

/// Ordering that treats sentinels as the extended reals (-inf < x < +inf).
bool extended_less_equal(const Extended& a, const Extended& b);

}  // namespace nehari
