#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace hidtrig {

using BigInt = mpz_class;
using Rational = mpq_class;

// "0.05", "1e-3", "3/7". Exact; throws Parse on malformed text.
Rational rational_from_text(std::string_view text);

// Exact value of the shortest decimal that round-trips to `value`, so
// 0.05 becomes 1/20 rather than the nearest binary fraction.
Rational rational_from_double(double value);

// Shortest round-trip decimal text of a double (std::to_chars).
std::string format_double(double value);

std::string to_string(const BigInt& value);
// "num/den" in lowest terms, or "num" when den == 1.
std::string to_string(const Rational& value);

}  // namespace hidtrig
