#include "apcircle/arith.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "apcircle/errors.hpp"

namespace apcircle::arith {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

constexpr u64 kTrialLimit = u64{1} << 20;

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<bool> composite(kTrialLimit + 1, false);
        std::vector<std::uint32_t> out;
        for (u64 p = 2; p <= kTrialLimit; ++p) {
            if (composite[p]) continue;
            out.push_back(static_cast<std::uint32_t>(p));
            for (u64 m = p * p; m <= kTrialLimit; m += p) composite[m] = true;
        }
        return out;
    }();
    return primes;
}

bool miller_rabin_witness(u64 n, u64 a, u64 d, int r) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

// Brent's variant of Pollard rho; n is odd, composite and not a prime power
// of a small prime.
u64 pollard_brent(u64 n) {
    for (u64 c = 1;; ++c) {
        auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        constexpr u64 m = 128;
        for (u64 r = 1; g == 1; r <<= 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && g == 1; k += m) {
                ys = y;
                for (u64 i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
            }
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_large(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_brent(n);
    factor_large(d, out);
    factor_large(n / d, out);
}

}  // namespace

u64 Factorization::value() const {
    u64 v = 1;
    for (const auto& [p, e] : factors) v *= ipow(p, e);
    return v;
}

u64 gcd(u64 u, u64 v) { return std::gcd(u, v); }

u64 gcd3(u64 u, u64 v, u64 w) { return std::gcd(std::gcd(u, v), w); }

u64 reduce(std::int64_t a, u64 q) {
    if (a >= 0) return static_cast<u64>(a) % q;
    // -(a+1) avoids overflow at INT64_MIN.
    u64 neg = (static_cast<u64>(-(a + 1)) + 1) % q;
    return neg == 0 ? 0 : q - neg;
}

u64 mul_mod(u64 a, u64 b, u64 q) {
    return static_cast<u64>(static_cast<u128>(a) * b % q);
}

u64 pow_mod(u64 base, u64 exp, u64 q) {
    u64 result = 1 % q;
    base %= q;
    while (exp > 0) {
        if (exp & 1) result = mul_mod(result, base, q);
        base = mul_mod(base, base, q);
        exp >>= 1;
    }
    return result;
}

u64 mod_inverse(std::int64_t a, u64 q) {
    if (q == 0) throw DomainError("mod_inverse: modulus must be positive");
    if (q == 1) return 0;
    u64 r = reduce(a, q);
    // Extended Euclid on (r, q) with signed 128-bit coefficients.
    __int128 old_r = r, cur_r = q, old_s = 1, cur_s = 0;
    while (cur_r != 0) {
        __int128 quot = old_r / cur_r;
        __int128 tmp = old_r - quot * cur_r;
        old_r = cur_r;
        cur_r = tmp;
        tmp = old_s - quot * cur_s;
        old_s = cur_s;
        cur_s = tmp;
    }
    if (old_r != 1) {
        throw NotCoprime("mod_inverse: gcd(" + std::to_string(a) + ", " + std::to_string(q) +
                         ") = " + std::to_string(static_cast<u64>(old_r)));
    }
    __int128 s = old_s % static_cast<__int128>(q);
    if (s < 0) s += q;
    return static_cast<u64>(s);
}

bool is_prime(u64 n) {
    if (n < 2) return false;
    static constexpr u64 witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : witnesses) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int r = std::countr_zero(d);
    d >>= r;
    for (u64 a : witnesses) {
        if (!miller_rabin_witness(n, a, d, r)) return false;
    }
    return true;
}

Factorization factorize(u64 n) {
    if (n == 0) throw DomainError("factorize: n must be positive");
    if (n > (u64{1} << 63)) throw DomainError("factorize: n exceeds 2^63");
    Factorization f;
    for (std::uint32_t p : small_primes()) {
        if (u64{p} * p > n) break;
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        f.factors.push_back({p, e});
    }
    if (n == 1) return f;
    // Every prime factor of the cofactor now exceeds the trial bound (or the
    // cofactor is itself prime).
    if (n < kTrialLimit * kTrialLimit) {
        f.factors.push_back({n, 1});
        return f;
    }
    std::vector<u64> primes;
    factor_large(n, primes);
    std::sort(primes.begin(), primes.end());
    for (u64 p : primes) {
        if (!f.factors.empty() && f.factors.back().prime == p) {
            ++f.factors.back().exponent;
        } else {
            f.factors.push_back({p, 1});
        }
    }
    return f;
}

u64 tau(const Factorization& f) {
    u64 t = 1;
    for (const auto& pe : f.factors) t *= pe.exponent + 1;
    return t;
}

u64 tau(u64 n) { return tau(factorize(n)); }

u64 euler_phi(u64 n) {
    u64 phi = n;
    for (const auto& pe : factorize(n).factors) phi = phi / pe.prime * (pe.prime - 1);
    return phi;
}

u64 radical(u64 q) {
    u64 r = 1;
    for (const auto& pe : factorize(q).factors) r *= pe.prime;
    return r;
}

int jacobi(std::int64_t k, u64 q) {
    if (q % 2 == 0) throw EvenModulus("jacobi: modulus " + std::to_string(q) + " is even");
    u64 a = reduce(k, q);
    u64 n = q;
    int sign = 1;
    while (a != 0) {
        int twos = std::countr_zero(a);
        a >>= twos;
        if ((twos & 1) && (n % 8 == 3 || n % 8 == 5)) sign = -sign;
        if (a % 4 == 3 && n % 4 == 3) sign = -sign;
        std::swap(a, n);
        a %= n;
    }
    return n == 1 ? sign : 0;
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    // The double estimate is within a few units; settle it exactly.
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u64 ipow(u64 p, unsigned e) {
    u64 v = 1;
    while (e-- > 0) v *= p;
    return v;
}

}  // namespace apcircle::arith
