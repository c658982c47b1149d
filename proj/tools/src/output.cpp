#include "nehari_cli/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nehari::cli {
namespace {

std::string format(double v, int digits) {
  if (!std::isfinite(v)) {
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void dump(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth + 2), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",\n";
        }
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) {
          out += ",\n";
        }
        out += pad;
        dump(j[i], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      // JSON has no infinities; sentinels are tagged objects upstream.
      out += std::isfinite(v) ? format(v, 17) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

Json to_json(const Extended& x) {
  if (x.is_finite()) {
    return x.value();
  }
  Json j;
  j["tag"] = x.tag();
  j["reason"] = x.reason();
  return j;
}

Json to_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string csv_number(std::optional<double> x) { return x ? format(*x, 9) : std::string(); }

std::string csv_number(const Extended& x) { return x.is_finite() ? format(x.value(), 9) : x.tag(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') {
      q += '"';
    }
  }
  return q + "\"";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

std::string lambda_tag(double lambda) { return format(lambda, 9); }

}  // namespace nehari::cli
