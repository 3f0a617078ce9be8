#include "mixfrac/format.hpp"

#include <charconv>
#include <cmath>

#include "mixfrac/qvector.hpp"

namespace mixfrac {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  out += '\n';
  return out;
}

std::string QVector::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v_[i]);
  }
  return out + ")";
}

}  // namespace mixfrac
