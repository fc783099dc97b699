#pragma once

/**
 * @file arith.hpp
 * @brief Elementary number theory shared by every other module.
 *
 * Moduli and sizes are unsigned 64-bit; residues that may arrive negative
 * (targets, frequencies) are signed and reduced with reduce().  Products of
 * two 64-bit values go through 128-bit intermediates.
 */

#include <cstdint>
#include <vector>

namespace apcircle::arith {

struct PrimePower {
    std::uint64_t prime;
    unsigned exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Prime factorization, primes strictly increasing, exponents >= 1.
struct Factorization {
    std::vector<PrimePower> factors;

    /// Product of p^e over all entries.
    std::uint64_t value() const;

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

/// gcd(0, 0) = 0 and gcd(q, 0) = q.
std::uint64_t gcd(std::uint64_t u, std::uint64_t v);
std::uint64_t gcd3(std::uint64_t u, std::uint64_t v, std::uint64_t w);

/// Least nonnegative residue of a modulo q (q >= 1).
std::uint64_t reduce(std::int64_t a, std::uint64_t q);

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t q);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t q);

/// Inverse of a modulo q in [0, q); 0 when q == 1.  Throws NotCoprime.
std::uint64_t mod_inverse(std::int64_t a, std::uint64_t q);

/// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

/// Complete factorization of 1 <= n <= 2^63.
Factorization factorize(std::uint64_t n);

std::uint64_t tau(std::uint64_t n);
std::uint64_t tau(const Factorization& f);
std::uint64_t euler_phi(std::uint64_t n);
std::uint64_t radical(std::uint64_t q);

/// Jacobi symbol (k/q) for odd q >= 1; (k/1) = 1.  Throws EvenModulus.
int jacobi(std::int64_t k, std::uint64_t q);

/// floor(sqrt(n)), exact for the whole 64-bit range.
std::uint64_t isqrt(std::uint64_t n);

/// p^e, no overflow checking.
std::uint64_t ipow(std::uint64_t p, unsigned e);

}  // namespace apcircle::arith
