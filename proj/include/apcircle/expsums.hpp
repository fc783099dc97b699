#pragma once

/**
 * @file expsums.hpp
 * @brief Complete exponential sums modulo q.
 *
 *   S(q; k, m)       = sum_{alpha mod q} e((k alpha^2 + m alpha) / q)
 *   K(q; k, n)       = sum*_{alpha mod q} e((k alpha + n alpha^-1) / q)
 *   B(d; a, m, t)    = sum*_{l mod d} e(-a l / d) S(d; l, m) S(d; l, t)
 *   H_{h,n}(q, a)    = sum_{alpha^2 + beta^2 = a (q)} e((-alpha h - beta n) / q)
 *
 * with e(y) = exp(2 pi i y).  Every phase numerator is reduced modulo q as an
 * integer before any trigonometry happens.
 */

#include <complex>
#include <cstdint>
#include <vector>

namespace apcircle::counting {
class SqrtTable;
}

namespace apcircle::expsums {

using ComplexValue = std::complex<double>;

struct HSumQuery {
    std::uint64_t q;
    std::int64_t a;
    std::int64_t h;
    std::int64_t n;
};

enum class HBoundMode { full, simplified };

/// e(r / q) for an already reduced numerator r in [0, q).
ComplexValue unit_root(std::uint64_t r, std::uint64_t q);

/// Table of the q-th roots of unity; falls back to direct trigonometry above
/// kMaxTabulated.
class RootsOfUnity {
public:
    static constexpr std::uint64_t kMaxTabulated = 1'000'000;

    explicit RootsOfUnity(std::uint64_t q);

    std::uint64_t modulus() const { return q_; }

    /// e(r / q), r in [0, q).
    ComplexValue operator()(std::uint64_t r) const {
        return table_.empty() ? unit_root(r, q_) : table_[r];
    }

private:
    std::uint64_t q_;
    std::vector<ComplexValue> table_;
};

ComplexValue gauss_direct(std::uint64_t q, std::int64_t k, std::int64_t m);

/// Same value as gauss_direct, from the gcd reduction, the odd closed form,
/// the 2-power closed form and a CRT recombination of the two parts.
ComplexValue gauss_closed(std::uint64_t q, std::int64_t k, std::int64_t m);

ComplexValue kloosterman_direct(std::uint64_t q, std::int64_t k, std::int64_t n);

/// q^{1/2} tau(q) (q, k, n)^{1/2}.
double weil_bound_value(std::uint64_t q, std::int64_t k, std::int64_t n);

ComplexValue b_sum(std::uint64_t d, std::int64_t a, std::int64_t m, std::int64_t t);

/// O(q + #solutions) evaluation by walking alpha and looking up beta roots.
ComplexValue h_direct(const HSumQuery& query);
ComplexValue h_direct(const counting::SqrtTable& table, const RootsOfUnity& roots,
                      const HSumQuery& query);

/// Multiplicative split into prime-power blocks, each block through the
/// divisor decomposition into B-sums.
ComplexValue h_fast(const HSumQuery& query);

/// Upper bound for |H_{h,n}(q, a)|.  full keeps (q, a, h^2+n^2), simplified
/// replaces it with (q, a).
double h_bound_value(const HSumQuery& query, HBoundMode mode);

/// Sharp bound |S(q; k, m)| <= sqrt(2 q (q, k)) that follows from the
/// closed forms.
double gauss_bound_value(std::uint64_t q, std::int64_t k);

}  // namespace apcircle::expsums
