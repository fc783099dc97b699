#include "apcircle/expsums.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "apcircle/arith.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/errors.hpp"

namespace apcircle::expsums {

using arith::gcd;
using arith::mod_inverse;
using arith::mul_mod;
using arith::reduce;
using u64 = std::uint64_t;

namespace {

// e(-r / q) for r in [0, q).
ComplexValue unit_root_neg(u64 r, u64 q) { return unit_root(r == 0 ? 0 : q - r, q); }

std::int64_t as_signed(u64 r) { return static_cast<std::int64_t>(r); }

// S(q; 1, 0) for odd q: sqrt(q) when q = 1 (mod 4), i sqrt(q) when q = 3 (mod 4).
ComplexValue gauss_unit_odd(u64 q) {
    const double root = std::sqrt(static_cast<double>(q));
    return q % 4 == 1 ? ComplexValue(root, 0.0) : ComplexValue(0.0, root);
}

// Odd q > 1, gcd(k, q) = 1:  S = e(-(4k)^-1 m^2 / q) (k/q) S(q; 1).
ComplexValue gauss_odd_coprime(u64 q, u64 k, u64 m) {
    const u64 inv4k = mod_inverse(as_signed(mul_mod(4, k, q)), q);
    const u64 phase = mul_mod(inv4k, mul_mod(m, m, q), q);
    return static_cast<double>(arith::jacobi(as_signed(k), q)) * unit_root_neg(phase, q) *
           gauss_unit_odd(q);
}

// q = 2^nu, r odd.
ComplexValue gauss_two_power_coprime(unsigned nu, u64 r, u64 t) {
    const u64 q = u64{1} << nu;
    if (nu == 1) {
        // Outside the closed form: alpha = 1, 2.
        return unit_root((r + t) % 2, 2) + ComplexValue(1.0, 0.0);
    }
    if (t % 2 == 1) return {0.0, 0.0};
    const u64 half = t / 2;
    const u64 phase = mul_mod(mod_inverse(as_signed(r), q), mul_mod(half, half, q), q);
    const double scale = std::pow(2.0, (nu + 1) / 2.0);
    ComplexValue twist;
    if (nu % 2 == 0) {
        // (1 + i^r) / sqrt(2)
        twist = r % 4 == 1 ? ComplexValue(1.0, 1.0) : ComplexValue(1.0, -1.0);
        twist /= std::numbers::sqrt2;
    } else {
        twist = unit_root(r % 8, 8);
    }
    return unit_root_neg(phase, q) * scale * twist;
}

// gcd(k, q) = 1.  q = odd * 2^nu, S(q; k, m) = S(odd; k c1, m c1) S(2^nu; k c2, m c2)
// with c1 = (2^nu)^-1 mod odd and c2 = odd^-1 mod 2^nu.
ComplexValue gauss_coprime(u64 q, u64 k, u64 m) {
    const unsigned nu = static_cast<unsigned>(std::countr_zero(q));
    const u64 pow2 = u64{1} << nu;
    const u64 odd = q >> nu;
    ComplexValue value(1.0, 0.0);
    if (odd > 1) {
        const u64 c1 = mod_inverse(as_signed(pow2 % odd), odd);
        value *= gauss_odd_coprime(odd, mul_mod(k % odd, c1, odd), mul_mod(m % odd, c1, odd));
    }
    if (pow2 > 1) {
        const u64 c2 = mod_inverse(as_signed(odd % pow2), pow2);
        value *= gauss_two_power_coprime(nu, mul_mod(k % pow2, c2, pow2),
                                         mul_mod(m % pow2, c2, pow2));
    }
    return value;
}

// One prime-power block of H via
//   H(Q) = Q sum_{d | Q, (Q/d) | (h, n)} d^-2 B(d; a, h d / Q, n d / Q).
ComplexValue h_prime_power(u64 p, unsigned e, u64 a, u64 h, u64 n) {
    const u64 block = arith::ipow(p, e);
    ComplexValue total(0.0, 0.0);
    u64 d = 1;
    for (unsigned j = 0; j <= e; ++j, d *= p) {
        const u64 cofactor = block / d;
        if (h % cofactor != 0 || n % cofactor != 0) continue;
        const double dd = static_cast<double>(d);
        total += b_sum(d, as_signed(a % d), as_signed(h / cofactor), as_signed(n / cofactor)) /
                 (dd * dd);
    }
    return total * static_cast<double>(block);
}

void check_modulus(u64 q, const char* who) {
    if (q == 0) throw DomainError(std::string(who) + ": modulus must be positive");
}

}  // namespace

ComplexValue unit_root(u64 r, u64 q) {
    if (r == 0) return {1.0, 0.0};
    // Fold into [0, 1/2] so the sine/cosine arguments stay small and the
    // symmetric values come out exactly conjugate.
    if (2 * r > q) return std::conj(unit_root(q - r, q));
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(q);
    return {std::cos(angle), std::sin(angle)};
}

RootsOfUnity::RootsOfUnity(u64 q) : q_(q) {
    check_modulus(q, "RootsOfUnity");
    if (q > kMaxTabulated) return;
    table_.resize(q);
    for (u64 r = 0; r < q; ++r) table_[r] = unit_root(r, q);
}

ComplexValue gauss_direct(u64 q, std::int64_t k, std::int64_t m) {
    check_modulus(q, "gauss_direct");
    const u64 kr = reduce(k, q), mr = reduce(m, q);
    const RootsOfUnity roots(q);
    ComplexValue sum(0.0, 0.0);
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const u64 a = alpha % q;
        const u64 phase = (mul_mod(mul_mod(kr, a, q), a, q) + mul_mod(mr, a, q)) % q;
        sum += roots(phase);
    }
    return sum;
}

ComplexValue gauss_closed(u64 q, std::int64_t k, std::int64_t m) {
    check_modulus(q, "gauss_closed");
    if (q == 1) return {1.0, 0.0};
    const u64 kr = reduce(k, q), mr = reduce(m, q);
    const u64 d = gcd(kr, q);  // gcd(0, q) = q
    if (mr % d != 0) return {0.0, 0.0};
    if (d == q) return {static_cast<double>(q), 0.0};
    return static_cast<double>(d) * gauss_coprime(q / d, kr / d, mr / d);
}

double gauss_bound_value(u64 q, std::int64_t k) {
    check_modulus(q, "gauss_bound_value");
    const double qd = static_cast<double>(q);
    return std::sqrt(2.0 * qd * static_cast<double>(gcd(reduce(k, q), q)));
}

ComplexValue kloosterman_direct(u64 q, std::int64_t k, std::int64_t n) {
    check_modulus(q, "kloosterman_direct");
    if (q == 1) return {1.0, 0.0};
    const u64 kr = reduce(k, q), nr = reduce(n, q);
    const RootsOfUnity roots(q);
    ComplexValue sum(0.0, 0.0);
    for (u64 alpha = 1; alpha < q; ++alpha) {
        if (gcd(alpha, q) != 1) continue;
        const u64 inv = mod_inverse(as_signed(alpha), q);
        sum += roots((mul_mod(kr, alpha, q) + mul_mod(nr, inv, q)) % q);
    }
    return sum;
}

double weil_bound_value(u64 q, std::int64_t k, std::int64_t n) {
    check_modulus(q, "weil_bound_value");
    const double g = static_cast<double>(arith::gcd3(q, reduce(k, q), reduce(n, q)));
    return std::sqrt(static_cast<double>(q)) * static_cast<double>(arith::tau(q)) * std::sqrt(g);
}

ComplexValue b_sum(u64 d, std::int64_t a, std::int64_t m, std::int64_t t) {
    check_modulus(d, "b_sum");
    if (d == 1) return {1.0, 0.0};
    const u64 ar = reduce(a, d);
    ComplexValue sum(0.0, 0.0);
    for (u64 l = 1; l < d; ++l) {
        if (gcd(l, d) != 1) continue;
        sum += unit_root_neg(mul_mod(ar, l, d), d) * gauss_closed(d, as_signed(l), m) *
               gauss_closed(d, as_signed(l), t);
    }
    return sum;
}

ComplexValue h_direct(const counting::SqrtTable& table, const RootsOfUnity& roots,
                      const HSumQuery& query) {
    const u64 q = table.modulus();
    const u64 a = reduce(query.a, q);
    // Phases -alpha h - beta n are accumulated with the negated frequencies.
    const u64 hneg = reduce(-(query.h % static_cast<std::int64_t>(q)), q);
    const u64 nneg = reduce(-(query.n % static_cast<std::int64_t>(q)), q);
    ComplexValue sum(0.0, 0.0);
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const u64 a2 = mul_mod(alpha, alpha, q);
        const u64 need = a >= a2 ? a - a2 : a + q - a2;
        const auto betas = table.roots(need);
        if (betas.empty()) continue;
        const u64 alpha_phase = mul_mod(hneg, alpha, q);
        for (std::uint32_t beta : betas) {
            sum += roots((alpha_phase + mul_mod(nneg, beta, q)) % q);
        }
    }
    return sum;
}

ComplexValue h_direct(const HSumQuery& query) {
    check_modulus(query.q, "h_direct");
    return h_direct(counting::SqrtTable(query.q), RootsOfUnity(query.q), query);
}

ComplexValue h_fast(const HSumQuery& query) {
    const u64 q = query.q;
    check_modulus(q, "h_fast");
    const u64 a = reduce(query.a, q), h = reduce(query.h, q), n = reduce(query.n, q);
    ComplexValue value(1.0, 0.0);
    for (const auto& [p, e] : arith::factorize(q).factors) {
        const u64 block = arith::ipow(p, e);
        const u64 twist = mod_inverse(as_signed((q / block) % block), block);
        value *= h_prime_power(p, e, a % block, mul_mod(h % block, twist, block),
                               mul_mod(n % block, twist, block));
    }
    return value;
}

double h_bound_value(const HSumQuery& query, HBoundMode mode) {
    const u64 q = query.q;
    check_modulus(q, "h_bound_value");
    const u64 a = reduce(query.a, q), h = reduce(query.h, q), n = reduce(query.n, q);
    const double qd = static_cast<double>(q);
    const double t = static_cast<double>(arith::tau(q));
    const double hn = static_cast<double>(arith::gcd3(q, h, n));
    const u64 last = mode == HBoundMode::full
                         ? arith::gcd3(q, a, (mul_mod(h, h, q) + mul_mod(n, n, q)) % q)
                         : gcd(q, a);
    return 4.0 * std::sqrt(qd) * t * t * std::sqrt(hn) * std::sqrt(static_cast<double>(last));
}

}  // namespace apcircle::expsums
