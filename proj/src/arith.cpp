#include "schedkernel/arith.hpp"

#include <stdexcept>

namespace schedkernel {

Int ceil_div(const Int& num, const Int& den) {
  if (sgn(den) <= 0) {
    throw std::invalid_argument("ceil_div: denominator must be positive, got " +
                                den.get_str());
  }
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

Int floor_div(const Int& num, const Int& den) {
  return -ceil_div(-num, den);
}

Int ceil(const Rational& x) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Int floor(const Rational& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

std::int64_t to_int64(const Int& x) {
  if (!x.fits_slong_p()) {
    throw std::overflow_error("integer does not fit in 64 bits: " + x.get_str());
  }
  return x.get_si();
}

std::string to_string(const Int& x) { return x.get_str(); }

std::string to_string(const Rational& x) {
  Rational reduced = x;
  reduced.canonicalize();
  return reduced.get_str();
}

void FractionSum::add(const Int& num, const Int& den) {
  num_ *= den;
  mpz_addmul(num_.get_mpz_t(), num.get_mpz_t(), den_.get_mpz_t());
  den_ *= den;
}

Rational FractionSum::value() const {
  Rational r(num_, den_);
  r.canonicalize();
  return r;
}

}  // namespace schedkernel
