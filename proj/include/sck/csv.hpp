#pragma once

#include <fmt/format.h>

#include <cmath>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace sck::csv {

/// Shortest representation that round-trips; "NA" for NaN.
inline std::string number(double v) {
  if (std::isnan(v)) return "NA";
  return fmt::format("{}", v);
}

/// Comma separated, '.' decimal, header row, LF line endings.
class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}

  void header(std::initializer_list<std::string_view> cols) {
    bool first = true;
    for (auto c : cols) {
      os_ << (first ? "" : ",") << c;
      first = false;
    }
    os_ << '\n';
  }

  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(fields), first = false), ...);
    os_ << '\n';
  }

 private:
  static std::string cell(double v) { return number(v); }
  static std::string cell(float v) { return number(v); }
  static std::string cell(std::string_view s) { return std::string(s); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
  static std::string cell(I v)
    requires std::is_integral_v<I>
  {
    return std::to_string(v);
  }

  std::ostream& os_;
};

}  // namespace sck::csv
