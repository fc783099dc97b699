#pragma once

/**
 * @file decomposition.hpp
 * @brief Sawtooth layer and the exact bookkeeping behind the lattice count.
 *
 * Notation used throughout: T = sqrt(x/2), U = floor(T) (the largest u with
 * 2u^2 <= x), and sum_{alpha,beta} runs over 1 <= alpha, beta <= q with
 * alpha^2 + beta^2 = a (mod q).  Every "u <= T" range is decided by the
 * integer test 2u^2 <= x.
 *
 *   S1      #{u <= T, v <= sqrt(x - u^2)}           (congruent pairs)
 *   S2      #{u <= T, v <= T}
 *   S1_0    sum_{alpha,beta} sum_{u = alpha} sqrt(x - u^2)
 *   S1_1    sum_{alpha,beta} sum_{u = alpha} rho((sqrt(x - u^2) - beta) / q)
 *   S1_2    sum_{alpha,beta} sum_{u = alpha} rho(-beta / q)
 *   S2_0    sum_{alpha,beta} sum_{u = alpha} 1
 *   S2_1    sum_{alpha,beta} sum_{u = alpha} rho((T - beta) / q)
 *   N       sum_{alpha,beta} rho((T - alpha) / q)
 *   N0      sum_{alpha,beta} rho(-alpha / q)
 *   D       sum_{alpha,beta} rho((T - alpha) / q) rho((T - beta) / q)
 *   Gamma   sum_{alpha,beta} int_0^T rho((t - alpha) / q) t / sqrt(x - t^2) dt
 */

#include <cstdint>
#include <map>
#include <span>
#include <string>

#include "apcircle/expsums.hpp"

namespace apcircle::decomposition {

using expsums::ComplexValue;

inline constexpr std::uint64_t kMaxDecomposeX = 100'000'000;
inline constexpr std::uint64_t kMaxDecomposeQ = 10'000;
inline constexpr std::uint64_t kMaxSumX = 10'000'000'000;

/// 1/2 - {y}.
double rho(double y);

/// sum_{n=1..M} sin(2 pi n y) / (pi n), the symmetric truncation of rho's
/// Fourier series.  M >= 2.
double rho_truncated(double y, std::int64_t M);

struct IntervalCount {
    std::int64_t count;
    double residual;  // |count - (y/q + rho((y - gamma)/q) - rho(-gamma/q))|
};

/// Naturals u <= y with u = gamma (mod q), gamma in [1, q].
IntervalCount ap_interval_count(double y, std::uint64_t q, std::uint64_t gamma);

/// sum_{u <= sqrt(x/2)} e((n sqrt(x - u^2) + h u) / q).  x <= 10^10.
ComplexValue t_sum(std::uint64_t x, std::uint64_t q, std::int64_t h, std::int64_t n);

/// sum_{alpha,beta} sum_{u <= sqrt(x/2), u = alpha} e(n (sqrt(x - u^2) - beta) / q).
ComplexValue f_sum(std::uint64_t x, std::uint64_t q, std::int64_t a, std::int64_t n);

/// (1/q) sum_{h mod q} H_{h,n}(q, a) T_{h,n}; the other side of f_sum.
ComplexValue f_sum_via_h(std::uint64_t x, std::uint64_t q, std::int64_t a, std::int64_t n);

struct DecomposeOptions {
    /// Absolute tolerance for the Gamma quadrature; <= 0 selects 1e-8 sqrt(x).
    double quadrature_tol = 0.0;
    /// Truncation for S1_1's Fourier form; 0 selects max(2, floor(x^{1/6})).
    std::int64_t fourier_m = 0;
    /// Truncation for D's double Fourier form; 0 selects max(2, q^2).
    std::int64_t fourier_m1 = 0;
};

struct DecompositionReport {
    std::uint64_t x = 0;
    std::uint64_t q = 1;
    std::uint64_t a = 0;

    std::uint64_t total = 0;  // S_{q,a}(x), counted pair by pair
    std::uint64_t quadrant = 0;
    std::uint64_t axis = 0;
    std::uint64_t origin = 0;
    std::uint64_t eta = 0;
    std::uint64_t omega = 0;

    std::uint64_t s1 = 0;
    std::uint64_t s2 = 0;
    double s1_0 = 0, s1_1 = 0, s1_2 = 0, s2_0 = 0, s2_1 = 0;
    double frak_n = 0, frak_n0 = 0, frak_d = 0;
    double gamma_sum = 0;
    double gamma_error = 0;  // quadrature error estimate
    double quadrature_tol = 0;

    std::int64_t fourier_m = 0;
    std::int64_t fourier_m1 = 0;
    double s1_1_truncated = 0;  // rho replaced by its M-term series
    double frak_d_truncated = 0;

    /// identity label -> |LHS - RHS|
    std::map<std::string, double> residuals;
};

/// x <= 10^8, q <= 10^4.  Throws InputTooLarge or QuadratureFailure.
DecompositionReport decompose(std::uint64_t x, std::uint64_t q, std::int64_t a,
                              const DecomposeOptions& options = {});

/// Labels of residuals that must vanish up to rounding.
inline constexpr const char* kExactIdentities[] = {"total_split", "quadrant_hyperbola", "s1_split", "s2_split", "n_zero_half_omega"};

/// Ratios of the pipeline quantities to their asserted orders of magnitude.
struct PipelineRatios {
    double s1_1;       // |S1_1| / ((q^{1/2} + x^{1/3}) tau^4 (q,a)^{1/2} ln^4 x)
    double frak_d;     // |D| / (q^{1/2} tau^3 (q,a)^{1/2} ln^4 x)
    double gamma_sum;  // |Gamma| / (q^{3/2} tau^3 (q,a)^{1/2})
};

PipelineRatios pipeline_ratios(const DecompositionReport& report);

struct GammaSeriesCheck {
    double quadrature;       // sum Gamma_alpha by quadrature
    double series;           // sum_{n <= N} D_n E_n / (pi n)
    double residual;         // |quadrature - series|
    double max_sine_sum;     // max_n |sum_{alpha,beta} sin(2 pi n alpha / q)|
};

GammaSeriesCheck verify_gamma_series(std::uint64_t x, std::uint64_t q, std::int64_t a,
                                     std::int64_t terms);

/// sum_{alpha,beta} rho(-alpha/q) w_beta, with weights[beta - 1] = w_beta.
double weighted_rho_sum(std::uint64_t q, std::int64_t a, std::span<const double> weights);

/// D_n = sum_{alpha,beta} cos(2 pi n alpha / q).
double cosine_sum(std::uint64_t q, std::int64_t a, std::int64_t n);

/// E_n = int_0^T sin(2 pi n t / q) t / sqrt(x - t^2) dt.
double sine_integral(std::uint64_t x, std::uint64_t q, std::int64_t n);

}  // namespace apcircle::decomposition
