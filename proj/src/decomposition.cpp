#include "apcircle/decomposition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "apcircle/arith.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/errors.hpp"

namespace apcircle::decomposition {

using arith::reduce;
using counting::SqrtTable;
using u64 = std::uint64_t;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSimpsonDepth = 40;
constexpr double kTruncatedBudget = 2e7;  // sine evaluations allowed for D's Fourier form

/// sqrt(num) split as floor + fractional part, exact when num is a square.
struct SplitRoot {
    u64 floor;
    double frac;
};

SplitRoot split_sqrt(u64 num) {
    const u64 r = arith::isqrt(num);
    if (r * r == num) return {r, 0.0};
    double frac = std::sqrt(static_cast<double>(num)) - static_cast<double>(r);
    return {r, std::clamp(frac, 0.0, std::nextafter(1.0, 0.0))};
}

/// sqrt(x/2) split the same way.
SplitRoot split_half_root(u64 x) {
    const u64 r = arith::isqrt(x / 2);
    if (2 * r * r == x) return {r, 0.0};
    double frac = std::sqrt(static_cast<double>(x) / 2.0) - static_cast<double>(r);
    return {r, std::clamp(frac, 0.0, std::nextafter(1.0, 0.0))};
}

/// Fractional part of (root - beta) / q, with the integer part handled exactly.
double shifted_frac(const SplitRoot& root, u64 beta, u64 q) {
    const std::int64_t diff = static_cast<std::int64_t>(root.floor) - static_cast<std::int64_t>(beta);
    return (static_cast<double>(reduce(diff, q)) + root.frac) / static_cast<double>(q);
}

double rho_from_frac(double frac) { return 0.5 - frac; }

double rho_shifted(const SplitRoot& root, u64 beta, u64 q) {
    return rho_from_frac(shifted_frac(root, beta, q));
}

/// rho(-beta / q), beta in [1, q].
double rho_neg(u64 beta, u64 q) {
    return rho_from_frac(static_cast<double>(reduce(-static_cast<std::int64_t>(beta), q)) /
                         static_cast<double>(q));
}

/// e(y) for y given as an integer numerator mod q plus a real offset.
ComplexValue phase_root(u64 int_part, double real_part, u64 q) {
    double y = (static_cast<double>(int_part) + real_part) / static_cast<double>(q);
    y -= std::floor(y);
    return {std::cos(2.0 * kPi * y), std::sin(2.0 * kPi * y)};
}

struct Quadrature {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

double simpson(double a, double fa, double fm, double fb, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
void simpson_refine(const F& f, double a, double fa, double m, double fm, double b, double fb,
                    double whole, double tol, int depth, Quadrature& out) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, flm, fm, m);
    const double right = simpson(m, fm, frm, fb, b);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= kMaxSimpsonDepth) {
        if (std::abs(delta) > 15.0 * tol) out.converged = false;
        out.value += left + right + delta / 15.0;
        out.error += std::abs(delta) / 15.0;
        return;
    }
    simpson_refine(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, out);
    simpson_refine(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, out);
}

/// Adaptive Simpson on a panel where f is smooth; accumulates into out.
template <class F>
void integrate_panel(const F& f, double a, double b, double tol, Quadrature& out) {
    if (!(b > a)) return;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    simpson_refine(f, a, fa, m, fm, b, fb, simpson(a, fa, fm, fb, b), tol, 0, out);
}

constexpr int kLegendreOrder = 20;

struct LegendreRule {
    std::array<double, kLegendreOrder> node{};
    std::array<double, kLegendreOrder> weight{};
};

/// Nodes by Newton iteration on P_n from the Chebyshev guesses.
const LegendreRule& legendre_rule() {
    static const LegendreRule rule = [] {
        LegendreRule r;
        constexpr int n = kLegendreOrder;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1.0);
                const double step = p1 / dp;
                z -= step;
                if (std::abs(step) < 1e-16) break;
            }
            r.node[i] = z;
            r.weight[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
        return r;
    }();
    return rule;
}

/// Fixed-order Gauss-Legendre on [a, b]; for integrands analytic near the panel.
template <class F>
double gauss_legendre(const F& f, double a, double b) {
    const auto& rule = legendre_rule();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < kLegendreOrder; ++i) sum += rule.weight[i] * f(mid + half * rule.node[i]);
    return sum * half;
}

/// Gamma_alpha = int_0^T rho((t - alpha)/q) t / sqrt(x - t^2) dt, split at
/// the jumps t = alpha + k q so every panel has a linear sawtooth factor.
Quadrature gamma_integral(u64 x, u64 q, u64 alpha, double tol) {
    Quadrature out;
    const double xd = static_cast<double>(x);
    const double top = std::sqrt(xd / 2.0);
    const double qd = static_cast<double>(q);
    if (top <= 0.0) return out;
    double lo = 0.0;
    double jump = static_cast<double>(alpha);
    while (lo < top) {
        const double hi = std::min(jump, top);
        if (hi > lo) {
            const double shift = std::floor((0.5 * (lo + hi) - static_cast<double>(alpha)) / qd);
            auto f = [&](double t) {
                return (0.5 - ((t - static_cast<double>(alpha)) / qd - shift)) * t /
                       std::sqrt(xd - t * t);
            };
            integrate_panel(f, lo, hi, tol * (hi - lo) / top, out);
        }
        lo = hi;
        jump += qd;
    }
    return out;
}

struct GammaTotal {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

GammaTotal gamma_total(const SqrtTable& table, u64 x, u64 a, double tol) {
    const u64 q = table.modulus();
    GammaTotal total;
    u64 weight_sum = 0;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        weight_sum += table.count(reduce(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(alpha * alpha % q), q));
    }
    if (weight_sum == 0) return total;
    const double per_alpha = tol / static_cast<double>(weight_sum);
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const u64 weight = table.count(
            reduce(static_cast<std::int64_t>(a) - static_cast<std::int64_t>(alpha * alpha % q), q));
        if (weight == 0) continue;
        const Quadrature g = gamma_integral(x, q, alpha, per_alpha);
        total.value += static_cast<double>(weight) * g.value;
        total.error += static_cast<double>(weight) * g.error;
        total.converged = total.converged && g.converged;
    }
    return total;
}

std::int64_t sixth_root_floor(u64 x) {
    auto sixth = [](u64 m) {
        const unsigned __int128 m3 = static_cast<unsigned __int128>(m) * m * m;
        return m3 * m3;
    };
    u64 m = static_cast<u64>(std::cbrt(std::sqrt(static_cast<double>(x))));
    while (m > 0 && sixth(m) > x) --m;
    while (sixth(m + 1) <= x) ++m;
    return static_cast<std::int64_t>(m);
}

u64 residue_of_rest(u64 a, u64 square, u64 q) {
    return a >= square ? a - square : a + q - square;
}

void check_sum_input(u64 x, u64 q, const char* who) {
    if (q == 0) throw DomainError(std::string(who) + ": modulus must be positive");
    if (x > kMaxSumX) {
        throw InputTooLarge(std::string(who) + ": x = " + std::to_string(x) + " exceeds 10^10");
    }
}

}  // namespace

double rho(double y) { return 0.5 - (y - std::floor(y)); }

double rho_truncated(double y, std::int64_t M) {
    if (M < 2) throw DomainError("rho_truncated: M must be at least 2");
    const double frac = y - std::floor(y);
    double sum = 0.0;
    for (std::int64_t n = M; n >= 1; --n) {
        const double nd = static_cast<double>(n);
        sum += std::sin(2.0 * kPi * nd * frac) / (kPi * nd);
    }
    return sum;
}

IntervalCount ap_interval_count(double y, u64 q, u64 gamma) {
    if (q == 0) throw DomainError("ap_interval_count: modulus must be positive");
    if (y < 0.0) throw DomainError("ap_interval_count: y must be nonnegative");
    if (gamma < 1 || gamma > q) throw DomainError("ap_interval_count: gamma must lie in [1, q]");
    const double qd = static_cast<double>(q);
    const double g = static_cast<double>(gamma);
    std::int64_t count = 0;
    if (y >= g) count = static_cast<std::int64_t>(std::floor((y - g) / qd)) + 1;
    const double formula = y / qd + rho((y - g) / qd) - rho(-g / qd);
    return {count, std::abs(static_cast<double>(count) - formula)};
}

ComplexValue t_sum(u64 x, u64 q, std::int64_t h, std::int64_t n) {
    check_sum_input(x, q, "t_sum");
    const u64 umax = arith::isqrt(x / 2);
    const u64 hr = reduce(h, q);
    const u64 nr = reduce(n, q);
    const double nd = static_cast<double>(n);
    ComplexValue sum(0.0, 0.0);
    for (u64 u = 1; u <= umax; ++u) {
        const SplitRoot s = split_sqrt(x - u * u);
        // n sqrt(x - u^2) + h u = [n floor + h u] + n frac
        const u64 int_part = (arith::mul_mod(nr, s.floor % q, q) + arith::mul_mod(hr, u % q, q)) % q;
        sum += phase_root(int_part, nd * s.frac, q);
    }
    return sum;
}

ComplexValue f_sum(u64 x, u64 q, std::int64_t a, std::int64_t n) {
    check_sum_input(x, q, "f_sum");
    const SqrtTable table(q);
    const u64 ar = reduce(a, q);
    const u64 nr = reduce(n, q);
    const double nd = static_cast<double>(n);
    const u64 umax = arith::isqrt(x / 2);
    ComplexValue sum(0.0, 0.0);
    for (u64 u = 1; u <= umax; ++u) {
        const auto betas = table.roots(residue_of_rest(ar, arith::mul_mod(u, u, q), q));
        if (betas.empty()) continue;
        const SplitRoot s = split_sqrt(x - u * u);
        for (std::uint32_t beta : betas) {
            const std::int64_t diff = static_cast<std::int64_t>(s.floor) - static_cast<std::int64_t>(beta);
            sum += phase_root(arith::mul_mod(nr, reduce(diff, q), q), nd * s.frac, q);
        }
    }
    return sum;
}

ComplexValue f_sum_via_h(u64 x, u64 q, std::int64_t a, std::int64_t n) {
    check_sum_input(x, q, "f_sum_via_h");
    const SqrtTable table(q);
    const expsums::RootsOfUnity roots(q);
    ComplexValue sum(0.0, 0.0);
    for (u64 h = 0; h < q; ++h) {
        const auto hh = static_cast<std::int64_t>(h);
        sum += expsums::h_direct(table, roots, {q, a, hh, n}) * t_sum(x, q, hh, n);
    }
    return sum / static_cast<double>(q);
}

DecompositionReport decompose(u64 x, u64 q, std::int64_t a, const DecomposeOptions& options) {
    if (q == 0) throw DomainError("decompose: modulus must be positive");
    if (x > kMaxDecomposeX) {
        throw InputTooLarge("decompose: x = " + std::to_string(x) + " exceeds 10^8");
    }
    if (q > kMaxDecomposeQ) {
        throw InputTooLarge("decompose: q = " + std::to_string(q) + " exceeds 10^4");
    }

    DecompositionReport rep;
    rep.x = x;
    rep.q = q;
    rep.a = reduce(a, q);
    const u64 ar = rep.a;
    const double xd = static_cast<double>(x);
    const double qd = static_cast<double>(q);
    const double top = std::sqrt(xd / 2.0);
    rep.quadrature_tol = options.quadrature_tol > 0.0 ? options.quadrature_tol : 1e-8 * std::sqrt(xd);
    rep.fourier_m = options.fourier_m > 0 ? options.fourier_m
                                          : std::max<std::int64_t>(2, sixth_root_floor(x));
    rep.fourier_m1 = options.fourier_m1 > 0 ? options.fourier_m1
                                            : std::max<std::int64_t>(2, static_cast<std::int64_t>(q * q));
    if (rep.fourier_m < 2 || rep.fourier_m1 < 2) throw DomainError("decompose: truncations must be >= 2");

    const SqrtTable table(q);
    rep.eta = counting::eta(table, a);
    rep.omega = counting::omega(table, a);

    const counting::CountResult brute = counting::count_brute(x, q, a);
    const counting::CountResult fast = counting::count_progression(table, x, a);
    rep.total = brute.total;
    rep.quadrant = fast.quadrant;
    rep.axis = fast.axis;
    rep.origin = fast.origin;

    const u64 umax = arith::isqrt(x / 2);

    // S1 and S2 pair by pair.
    for (u64 u = 1; u <= umax; ++u) {
        const u64 ymax = arith::isqrt(x - u * u);
        u64 residue = u * u % q;
        for (u64 v = 1; v <= ymax; ++v) {
            residue = (residue + 2 * v - 1) % q;
            if (residue != ar) continue;
            ++rep.s1;
            if (v <= umax) ++rep.s2;
        }
    }

    // u-indexed sums over the root lists.
    const SplitRoot top_split = split_half_root(x);
    std::vector<double> rho_top(q + 1), rho_zero(q + 1);
    for (u64 beta = 1; beta <= q; ++beta) {
        rho_top[beta] = rho_shifted(top_split, beta, q);
        rho_zero[beta] = rho_neg(beta, q);
    }
    for (u64 u = 1; u <= umax; ++u) {
        const auto betas = table.roots(residue_of_rest(ar, u * u % q, q));
        if (betas.empty()) continue;
        const u64 rest = x - u * u;
        const SplitRoot s = split_sqrt(rest);
        rep.s1_0 += static_cast<double>(betas.size()) * std::sqrt(static_cast<double>(rest));
        rep.s2_0 += static_cast<double>(betas.size());
        for (std::uint32_t beta : betas) {
            const double frac = shifted_frac(s, beta, q);
            rep.s1_1 += rho_from_frac(frac);
            rep.s1_1_truncated += rho_truncated(frac, rep.fourier_m);
            rep.s1_2 += rho_zero[beta];
            rep.s2_1 += rho_top[beta];
        }
    }

    // alpha-indexed sums over the solution set.
    double rhs_s1_2 = 0.0, rhs_s2_1 = 0.0;
    const bool truncated_d =
        static_cast<double>(q) * static_cast<double>(rep.fourier_m1) <= kTruncatedBudget;
    std::vector<double> trunc_top;
    if (truncated_d) {
        trunc_top.assign(q + 1, 0.0);
        for (u64 beta = 1; beta <= q; ++beta) {
            trunc_top[beta] = rho_truncated(shifted_frac(top_split, beta, q), rep.fourier_m1);
        }
    } else {
        rep.frak_d_truncated = std::nan("");
    }
    const double top_over_q = top / qd;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const auto betas = table.roots(residue_of_rest(ar, alpha * alpha % q, q));
        if (betas.empty()) continue;
        const double weight = static_cast<double>(betas.size());
        rep.frak_n += weight * rho_top[alpha];
        rep.frak_n0 += weight * rho_zero[alpha];
        const double count_alpha = top_over_q + rho_top[alpha] - rho_zero[alpha];
        for (std::uint32_t beta : betas) {
            rep.frak_d += rho_top[alpha] * rho_top[beta];
            if (truncated_d) rep.frak_d_truncated += trunc_top[alpha] * trunc_top[beta];
            rhs_s1_2 += rho_zero[beta] * count_alpha;
            rhs_s2_1 += rho_top[beta] * count_alpha;
        }
    }

    const GammaTotal gamma = gamma_total(table, x, ar, rep.quadrature_tol);
    rep.gamma_sum = gamma.value;
    rep.gamma_error = gamma.error;
    if (!gamma.converged || gamma.error > rep.quadrature_tol) {
        throw QuadratureFailure("decompose: Gamma quadrature error estimate " +
                                std::to_string(gamma.error) + " exceeds tolerance " +
                                std::to_string(rep.quadrature_tol));
    }

    const double eta_d = static_cast<double>(rep.eta);
    const double omega_d = static_cast<double>(rep.omega);
    const double sqrt_x = std::sqrt(xd);
    const double lead = (kPi / 8.0 + 0.25) * eta_d / qd * xd;
    auto& res = rep.residuals;
    res["total_split"] = std::abs(static_cast<double>(rep.total) -
                         static_cast<double>(4 * rep.quadrant + 4 * rep.axis + rep.origin));
    res["quadrant_hyperbola"] = std::abs(static_cast<double>(rep.quadrant) -
                         (2.0 * static_cast<double>(rep.s1) - static_cast<double>(rep.s2)));
    res["s1_split"] = std::abs(static_cast<double>(rep.s1) - (rep.s1_0 / qd + rep.s1_1 - rep.s1_2));
    res["s2_split"] = std::abs(static_cast<double>(rep.s2) -
                          (top_over_q * rep.s2_0 + rep.s2_1 - rep.s1_2));
    res["n_zero_half_omega"] = std::abs(rep.frak_n0 - omega_d / 2.0);
    res["s1_0_reconstruction"] = std::abs(rep.s1_0 - (lead + top * rep.frak_n - sqrt_x * rep.frak_n0 + rep.gamma_sum));
    res["s1_0_closed"] = std::abs(rep.s1_0 -
                          (lead + top * rep.frak_n - sqrt_x / 2.0 * omega_d + rep.gamma_sum));
    res["s1_2_closed"] = std::abs(rep.s1_2 - rhs_s1_2);
    res["s2_0_closed"] = std::abs(rep.s2_0 - (eta_d * top_over_q + rep.frak_n - omega_d / 2.0));
    res["s2_1_closed"] = std::abs(rep.s2_1 - rhs_s2_1);
    res["total_reassembly"] = std::abs(static_cast<double>(rep.total) -
                          (8.0 / qd * rep.s1_0 + 8.0 * rep.s1_1 - 4.0 * rep.s1_2 -
                           4.0 * top_over_q * rep.s2_0 - 4.0 * rep.s2_1 +
                           4.0 * static_cast<double>(rep.axis) + static_cast<double>(rep.origin)));
    return rep;
}

PipelineRatios pipeline_ratios(const DecompositionReport& r) {
    const double qd = static_cast<double>(r.q);
    const double t = static_cast<double>(arith::tau(r.q));
    const double g = std::sqrt(static_cast<double>(arith::gcd(r.q, r.a)));
    const double lx = std::max(1.0, std::log(static_cast<double>(r.x)));
    const double l4 = lx * lx * lx * lx;
    PipelineRatios out{};
    out.s1_1 = std::abs(r.s1_1) /
               ((std::sqrt(qd) + std::cbrt(static_cast<double>(r.x))) * t * t * t * t * g * l4);
    out.frak_d = std::abs(r.frak_d) / (std::sqrt(qd) * t * t * t * g * l4);
    out.gamma_sum = std::abs(r.gamma_sum) / (qd * std::sqrt(qd) * t * t * t * g);
    return out;
}

double weighted_rho_sum(u64 q, std::int64_t a, std::span<const double> weights) {
    if (q == 0) throw DomainError("weighted_rho_sum: modulus must be positive");
    if (weights.size() != q) throw DomainError("weighted_rho_sum: need one weight per beta");
    const SqrtTable table(q);
    const u64 ar = reduce(a, q);
    double sum = 0.0;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const double r = rho_neg(alpha, q);
        for (std::uint32_t beta : table.roots(residue_of_rest(ar, alpha * alpha % q, q))) {
            sum += r * weights[beta - 1];
        }
    }
    return sum;
}

double cosine_sum(u64 q, std::int64_t a, std::int64_t n) {
    if (q == 0) throw DomainError("cosine_sum: modulus must be positive");
    const SqrtTable table(q);
    const u64 ar = reduce(a, q), nr = reduce(n, q);
    double sum = 0.0;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const u64 weight = table.count(residue_of_rest(ar, alpha * alpha % q, q));
        if (weight == 0) continue;
        sum += static_cast<double>(weight) * expsums::unit_root(arith::mul_mod(nr, alpha, q), q).real();
    }
    return sum;
}

double sine_integral(u64 x, u64 q, std::int64_t n) {
    if (q == 0) throw DomainError("sine_integral: modulus must be positive");
    const double xd = static_cast<double>(x);
    const double top = std::sqrt(xd / 2.0);
    if (top <= 0.0 || n == 0) return 0.0;
    const double freq = 2.0 * kPi * static_cast<double>(n) / static_cast<double>(q);
    auto f = [&](double t) { return std::sin(freq * t) * t / std::sqrt(xd - t * t); };
    // One panel per half period.
    const double half_period = kPi / std::abs(freq);
    double value = 0.0;
    for (double lo = 0.0; lo < top; lo += half_period) value += gauss_legendre(f, lo, std::min(lo + half_period, top));
    return value;
}

GammaSeriesCheck verify_gamma_series(u64 x, u64 q, std::int64_t a, std::int64_t terms) {
    if (q == 0) throw DomainError("verify_gamma_series: modulus must be positive");
    if (x > kMaxDecomposeX || q > kMaxDecomposeQ) {
        throw InputTooLarge("verify_gamma_series: input outside x <= 10^8, q <= 10^4");
    }
    const SqrtTable table(q);
    const u64 ar = reduce(a, q);
    const double tol = 1e-8 * std::sqrt(static_cast<double>(x));
    const GammaTotal gamma = gamma_total(table, x, ar, tol);
    if (!gamma.converged || gamma.error > tol) {
        throw QuadratureFailure("verify_gamma_series: Gamma quadrature did not converge");
    }

    std::vector<u64> weights(q + 1, 0);
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        weights[alpha] = table.count(residue_of_rest(ar, alpha * alpha % q, q));
    }

    GammaSeriesCheck out{};
    out.quadrature = gamma.value;
    for (std::int64_t n = 1; n <= terms; ++n) {
        const u64 nr = reduce(n, q);
        double cos_sum = 0.0, sin_sum = 0.0;
        for (u64 alpha = 1; alpha <= q; ++alpha) {
            if (weights[alpha] == 0) continue;
            const ComplexValue z = expsums::unit_root(arith::mul_mod(nr, alpha, q), q);
            cos_sum += static_cast<double>(weights[alpha]) * z.real();
            sin_sum += static_cast<double>(weights[alpha]) * z.imag();
        }
        out.max_sine_sum = std::max(out.max_sine_sum, std::abs(sin_sum));
        if (cos_sum == 0.0) continue;
        out.series += cos_sum * sine_integral(x, q, n) / (kPi * static_cast<double>(n));
    }
    out.residual = std::abs(out.quadrature - out.series);
    return out;
}

}  // namespace apcircle::decomposition
