#include "hidtrig/exact.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "hidtrig/error.hpp"

namespace hidtrig {

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  fail(ErrorKind::Parse, "malformed number '" + std::string(text) + "'");
}

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) bad_number(whole);
  for (char c : digits)
    if (c < '0' || c > '9') bad_number(whole);
  return BigInt(std::string(digits), 10);
}

}  // namespace

Rational rational_from_text(std::string_view text) {
  if (text.empty()) bad_number(text);
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    bool negative = false;
    if (!num.empty() && (num.front() == '-' || num.front() == '+')) {
      negative = num.front() == '-';
      num.remove_prefix(1);
    }
    BigInt n = parse_integer(num, text);
    BigInt d = parse_integer(text.substr(slash + 1), text);
    if (d == 0) bad_number(text);
    Rational r(negative ? BigInt(-n) : n, d);
    r.canonicalize();
    return r;
  }

  std::string_view rest = text;
  bool negative = false;
  if (rest.front() == '-' || rest.front() == '+') {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (const auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    const std::string_view exp_text = rest.substr(e + 1);
    const char* first = exp_text.data();
    if (!exp_text.empty() && exp_text.front() == '+') ++first;
    const auto res = std::from_chars(first, exp_text.data() + exp_text.size(), exponent);
    if (res.ec != std::errc{} || res.ptr != exp_text.data() + exp_text.size() || exp_text.empty()) bad_number(text);
    if (exponent > 100000 || exponent < -100000) bad_number(text);
    rest = rest.substr(0, e);
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_point = false;
  for (char c : rest) {
    if (c == '.') {
      if (seen_point) bad_number(text);
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_digits;
    } else {
      bad_number(text);
    }
  }
  if (digits.empty()) bad_number(text);
  BigInt mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  const long scale = exponent - frac_digits;
  BigInt power;
  mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational r = scale < 0 ? Rational(mantissa, power) : Rational(mantissa * power, 1);
  r.canonicalize();
  return r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) fail(ErrorKind::InvalidInput, "non-finite value has no rational form");
  return rational_from_text(format_double(value));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_string(const BigInt& value) { return value.get_str(10); }

std::string to_string(const Rational& value) {
  Rational r = value;
  r.canonicalize();
  if (r.get_den() == 1) return r.get_num().get_str(10);
  return r.get_num().get_str(10) + "/" + r.get_den().get_str(10);
}

}  // namespace hidtrig
