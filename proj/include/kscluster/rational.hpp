#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace kscluster {

using Rational = mpq_class;

// Accepts "p", "p/q" and plain decimals such as "-0.125" or "1e-3"; the result is exact.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

}  // namespace kscluster
