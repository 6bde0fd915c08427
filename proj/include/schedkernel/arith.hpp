#pragma once

// Exact integer and rational arithmetic shared by every module.

#include <gmpxx.h>

#include <cstdint>
#include <string>

namespace schedkernel {

using Int = mpz_class;
using Rational = mpq_class;

// Smallest integer >= num / den. Throws std::invalid_argument if den < 1.
Int ceil_div(const Int& num, const Int& den);

// Largest integer <= num / den, computed as -ceil_div(-num, den).
Int floor_div(const Int& num, const Int& den);

Int ceil(const Rational& x);
Int floor(const Rational& x);

// Converts to int64, throwing std::overflow_error if the value does not fit.
std::int64_t to_int64(const Int& x);

// Sum of fractions kept over the product of the denominators, so adding a
// term costs no gcd. Call value() once at the end.
class FractionSum {
 public:
  // Adds num / den; den must be positive.
  void add(const Int& num, const Int& den);
  const Int& numerator() const { return num_; }
  const Int& denominator() const { return den_; }
  Rational value() const;

 private:
  Int num_ = 0;
  Int den_ = 1;
};

std::string to_string(const Int& x);
std::string to_string(const Rational& x);

}  // namespace schedkernel
