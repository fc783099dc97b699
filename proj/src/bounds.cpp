#include "apcircle/bounds.hpp"

#include <cmath>
#include <string>

#include "apcircle/arith.hpp"
#include "apcircle/errors.hpp"

namespace apcircle::bounds {

using u64 = std::uint64_t;

namespace {

double ln4(u64 x) {
    const double l = std::log(static_cast<double>(x));
    return l * l * l * l;
}

void require_x_at_least_3(u64 x, const char* who) {
    if (x < 3) throw DomainError(std::string(who) + ": x must be at least 3");
}

void require_modulus(u64 q, const char* who) {
    if (q == 0) throw DomainError(std::string(who) + ": modulus must be positive");
}

bool is_one_mod(std::int64_t a, u64 q) { return arith::reduce(a, q) == 1 % q; }

}  // namespace

bool nontrivial_regime(u64 x, u64 q) {
    // q >= 2^42 gives q^3 >= 2^126 > x^2 for every 63-bit x.
    if (q >= (u64{1} << 42)) return false;
    using u128 = unsigned __int128;
    return static_cast<u128>(q) * q * q <= static_cast<u128>(x) * x;
}

double bound_tolev(u64 x, u64 q, std::int64_t a) {
    require_x_at_least_3(x, "bound_tolev");
    require_modulus(q, "bound_tolev");
    const double t = static_cast<double>(arith::tau(q));
    const double g = static_cast<double>(arith::gcd(arith::reduce(a, q), q));
    return (std::sqrt(static_cast<double>(q)) + std::cbrt(static_cast<double>(x))) * std::sqrt(g) *
           t * t * t * t * ln4(x);
}

double bound_smith(u64 x, u64 q, std::int64_t a, double xi) {
    require_modulus(q, "bound_smith");
    if (x < 1) throw DomainError("bound_smith: x must be at least 1");
    if (!(xi > 0.0 && xi < 1.0 / 3.0)) {
        throw DomainError("bound_smith: xi = " + std::to_string(xi) + " outside (0, 1/3)");
    }
    const double g = static_cast<double>(arith::gcd(arith::reduce(a, q), q));
    return std::pow(static_cast<double>(x), 2.0 / 3.0 + xi) *
           std::pow(static_cast<double>(q), -(1.0 + 3.0 * xi) / 2.0) * std::sqrt(g) *
           static_cast<double>(arith::tau(q));
}

std::optional<double> bound_varbanets(u64 x, u64 q, std::int64_t a, VarbanetsVariant variant) {
    require_x_at_least_3(x, "bound_varbanets");
    require_modulus(q, "bound_varbanets");
    if (!is_one_mod(a, q) || !nontrivial_regime(x, q)) return std::nullopt;
    const double qd = static_cast<double>(q);
    const double root_x = std::sqrt(static_cast<double>(x));
    if (variant == VarbanetsVariant::mid) {
        // x^{1/2} <= q
        if (static_cast<unsigned __int128>(q) * q < x) return std::nullopt;
        return (std::sqrt(qd) + root_x * std::pow(qd, -0.25)) * ln4(x);
    }
    // q^{1/4} > rad(q)  <=>  q > rad(q)^4
    const u64 rad = arith::radical(q);
    if (static_cast<unsigned __int128>(rad) * rad * rad * rad >= q) return std::nullopt;
    return (std::sqrt(qd) + root_x / std::sqrt(qd) * static_cast<double>(rad)) * ln4(x);
}

}  // namespace apcircle::bounds
