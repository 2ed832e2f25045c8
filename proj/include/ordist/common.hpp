#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ordist {

using Int = mpz_class;
using Rat = mpq_class;

enum class Errc {
  invalid_argument,
  not_sub_lattice,
  generators_insufficient,
  not_squarefree,
  not_prime,
  field_mismatch,
  modulus_too_large,
  not_coprime,
  not_divisor,
  prime_not_in_modulus,
  frame_unavailable,
  not_coprime_to_w,
  oracle_mismatch,
  wrong_shape,
  hypothesis_failed,
  not_cyclic,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::not_sub_lattice: return "NotSubLattice";
    case Errc::generators_insufficient: return "GeneratorsInsufficient";
    case Errc::not_squarefree: return "NotSquarefree";
    case Errc::not_prime: return "NotPrime";
    case Errc::field_mismatch: return "FieldMismatch";
    case Errc::modulus_too_large: return "ModulusTooLarge";
    case Errc::not_coprime: return "NotCoprime";
    case Errc::not_divisor: return "NotDivisor";
    case Errc::prime_not_in_modulus: return "PrimeNotInModulus";
    case Errc::frame_unavailable: return "FrameUnavailable";
    case Errc::not_coprime_to_w: return "NotCoprimeToW";
    case Errc::oracle_mismatch: return "OracleMismatch";
    case Errc::wrong_shape: return "WrongShape";
    case Errc::hypothesis_failed: return "HypothesisFailed";
    case Errc::not_cyclic: return "NotCyclic";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline Int to_int(long v) { return Int(v); }

/* Narrowing with a check; the group orders handled here are small but the
   arithmetic behind them is not. */
inline long to_long(const Int& v) {
  if (!v.fits_slong_p()) throw Error(Errc::invalid_argument, "integer does not fit in 64 bits: " + v.get_str());
  return v.get_si();
}

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

/* Quotient rounded to nearest, so that a - q*b is the symmetric remainder. */
inline Int round_div(const Int& a, const Int& b) {
  Int twice = 2 * a + b;
  Int q;
  if (b > 0) {
    mpz_fdiv_q(q.get_mpz_t(), twice.get_mpz_t(), Int(2 * b).get_mpz_t());
  } else {
    Int nb = -b;
    Int t = -2 * a + nb;
    mpz_fdiv_q(q.get_mpz_t(), t.get_mpz_t(), Int(2 * nb).get_mpz_t());
  }
  return q;
}

inline int cmpabs(const Int& a, const Int& b) { return mpz_cmpabs(a.get_mpz_t(), b.get_mpz_t()); }

inline long floor_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace ordist
