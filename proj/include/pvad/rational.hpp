#pragma once

#include <gmpxx.h>
#include <string>

namespace pvad {

using Rational = mpq_class;
using Integer = mpz_class;

// C(s, r) for any integer s and r >= 0; negative s uses the generalized rule.
Integer binomial(long s, unsigned long r);

std::string to_string(const Rational& q);

} // namespace pvad
