#include "apcircle/verify.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "apcircle/arith.hpp"
#include "apcircle/bounds.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/decomposition.hpp"
#include "apcircle/errors.hpp"
#include "apcircle/expsums.hpp"
#include "apcircle/rng.hpp"

namespace apcircle::verify {

using u64 = std::uint64_t;
using i64 = std::int64_t;

namespace {

// Collects the first counterexample and the worst slack of one property.
class Check {
public:
    explicit Check(std::string name) : name_(std::move(name)) {}

    void expect(bool ok, const std::string& context) {
        if (!ok && passed_) {
            passed_ = false;
            detail_ = context;
        }
    }

    // value <= limit, tracking the largest value / limit ratio seen.
    void at_most(double value, double limit, const std::string& context) {
        if (limit > 0) worst_ = std::max(worst_, value / limit);
        std::ostringstream os;
        os << context << ": " << value << " > " << limit;
        expect(value <= limit, os.str());
    }

    CheckResult result() const {
        CheckResult r{name_, passed_, detail_};
        if (passed_ && worst_ > 0) {
            std::ostringstream os;
            os << "worst ratio " << worst_;
            r.detail = os.str();
        }
        return r;
    }

private:
    std::string name_;
    bool passed_ = true;
    double worst_ = 0;
    std::string detail_;
};

std::string ctx(const char* what, std::initializer_list<i64> args) {
    std::ostringstream os;
    os << what << '(';
    bool first = true;
    for (auto v : args) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    os << ')';
    return os.str();
}

i64 s(u64 v) { return static_cast<i64>(v); }

std::vector<CheckResult> arith_suite(std::mt19937_64& rng) {
    std::vector<CheckResult> out;
    {
        Check c("gcd divides both arguments and is maximal");
        for (int i = 0; i < 2000; ++i) {
            const u64 u = uniform_below(rng, 1'000'000), v = uniform_below(rng, 1'000'000);
            const u64 g = arith::gcd(u, v);
            const bool divides = g == 0 ? (u == 0 && v == 0) : (u % g == 0 && v % g == 0);
            const bool coprime_rest = g == 0 || arith::gcd(u / g, v / g) <= 1;
            c.expect(divides && coprime_rest, ctx("gcd", {s(u), s(v)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("factorize reproduces n with prime factors");
        for (int i = 0; i < 300; ++i) {
            const u64 n = 1 + uniform_below(rng, u64{1} << 62);
            const auto f = arith::factorize(n);
            bool ok = f.value() == n;
            for (const auto& pp : f.factors) ok = ok && arith::is_prime(pp.prime) && pp.exponent >= 1;
            c.expect(ok, ctx("factorize", {s(n)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("tau, phi, radical against divisor enumeration");
        for (u64 n = 1; n <= 1500; ++n) {
            u64 divisors = 0, coprime = 0, rad = 1;
            for (u64 d = 1; d <= n; ++d) {
                if (n % d == 0) ++divisors;
                if (arith::gcd(d, n) == 1) ++coprime;
                if (n % d == 0 && d > 1 && arith::is_prime(d)) rad *= d;
            }
            c.expect(arith::tau(n) == divisors && arith::euler_phi(n) == coprime &&
                         arith::radical(n) == rad,
                     ctx("n", {s(n)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("jacobi matches Euler's criterion at odd primes");
        for (u64 p = 3; p < 400; p += 2) {
            if (!arith::is_prime(p)) continue;
            for (u64 k = 0; k < p; ++k) {
                const u64 e = arith::pow_mod(k, (p - 1) / 2, p);
                const int expected = e == 0 ? 0 : (e == 1 ? 1 : -1);
                c.expect(arith::jacobi(s(k), p) == expected, ctx("jacobi", {s(k), s(p)}));
            }
        }
        out.push_back(c.result());
    }
    {
        Check c("mod_inverse is an inverse");
        for (int i = 0; i < 2000; ++i) {
            const u64 q = 2 + uniform_below(rng, 1'000'000'000);
            const i64 a = static_cast<i64>(uniform_below(rng, 2'000'000'000)) - 1'000'000'000;
            if (arith::gcd(arith::reduce(a, q), q) != 1) continue;
            const u64 inv = arith::mod_inverse(a, q);
            c.expect(arith::mul_mod(arith::reduce(a, q), inv, q) == 1, ctx("inverse", {a, s(q)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("isqrt is the exact floor");
        for (int i = 0; i < 5000; ++i) {
            const u64 n = rng();
            const u64 r = arith::isqrt(n);
            using u128 = unsigned __int128;
            c.expect(static_cast<u128>(r) * r <= n && static_cast<u128>(r + 1) * (r + 1) > n,
                     ctx("isqrt", {s(n >> 1)}));
        }
        out.push_back(c.result());
    }
    return out;
}

std::vector<CheckResult> expsums_suite(std::mt19937_64& rng) {
    using namespace expsums;
    std::vector<CheckResult> out;
    {
        Check c("closed Gauss sum agrees with the direct sum");
        for (u64 q = 1; q <= 128; ++q) {
            for (int i = 0; i < 20; ++i) {
                const i64 k = s(uniform_below(rng, 4 * q)) - s(2 * q);
                const i64 m = s(uniform_below(rng, 4 * q)) - s(2 * q);
                const double err = std::abs(gauss_closed(q, k, m) - gauss_direct(q, k, m));
                c.at_most(err, 1e-8 * (1 + std::sqrt(static_cast<double>(q))), ctx("gauss", {s(q), k, m}));
            }
        }
        out.push_back(c.result());
    }
    {
        Check c("Gauss sums stay below sqrt(2 q (q, k))");
        for (u64 q = 1; q <= 128; ++q) {
            for (u64 k = 0; k < q; ++k) {
                const i64 m = s(uniform_below(rng, q));
                c.at_most(std::abs(gauss_closed(q, s(k), m)), gauss_bound_value(q, s(k)) + 1e-9,
                          ctx("gauss", {s(q), s(k), m}));
            }
        }
        out.push_back(c.result());
    }
    {
        Check c("Kloosterman sums are real and within the Weil bound");
        for (u64 q = 1; q <= 60; ++q) {
            for (u64 k = 0; k < q; ++k) {
                for (u64 n = 0; n < q; ++n) {
                    const auto v = kloosterman_direct(q, s(k), s(n));
                    c.expect(std::abs(v.imag()) <= 1e-9, ctx("imag", {s(q), s(k), s(n)}));
                    c.at_most(std::abs(v), weil_bound_value(q, s(k), s(n)) + 1e-9,
                              ctx("weil", {s(q), s(k), s(n)}));
                }
            }
        }
        out.push_back(c.result());
    }
    {
        Check c("fast H evaluation agrees with the direct sum");
        for (int i = 0; i < 200; ++i) {
            const u64 q = 1 + uniform_below(rng, 200);
            const HSumQuery query{q, s(uniform_below(rng, q)), s(uniform_below(rng, q)),
                                  s(uniform_below(rng, q))};
            const double t = static_cast<double>(arith::tau(q));
            const double err = std::abs(h_fast(query) - h_direct(query));
            c.at_most(err, 1e-6 * (1 + std::sqrt(static_cast<double>(q)) * t * t),
                      ctx("h", {s(q), query.a, query.h, query.n}));
        }
        out.push_back(c.result());
    }
    {
        Check c("H at zero frequencies counts the solutions");
        for (u64 q = 1; q <= 60; ++q) {
            for (u64 a = 0; a < q; ++a) {
                const auto v = h_fast({q, s(a), 0, 0});
                const double eta = static_cast<double>(counting::eta(q, s(a)));
                c.expect(std::abs(v.real() - eta) < 1e-6 && std::abs(v.imag()) < 1e-6,
                         ctx("h0", {s(q), s(a)}));
            }
        }
        out.push_back(c.result());
    }
    {
        Check c("H sums respect both bounds");
        for (int i = 0; i < 300; ++i) {
            const u64 q = 1 + uniform_below(rng, 400);
            const HSumQuery query{q, s(uniform_below(rng, q)), s(uniform_below(rng, q)),
                                  s(uniform_below(rng, q))};
            const double v = std::abs(h_direct(query));
            c.at_most(v, h_bound_value(query, HBoundMode::full) + 1e-9,
                      ctx("full", {s(q), query.a, query.h, query.n}));
            c.at_most(v, h_bound_value(query, HBoundMode::simplified) + 1e-9,
                      ctx("simplified", {s(q), query.a, query.h, query.n}));
        }
        out.push_back(c.result());
    }
    return out;
}

std::vector<CheckResult> counting_suite(std::mt19937_64& rng) {
    std::vector<CheckResult> out;
    {
        Check c("progression count equals the brute count");
        for (u64 q = 1; q <= 12; ++q) {
            for (u64 x = 0; x <= 150; ++x) {
                for (u64 a = 0; a < q; ++a) {
                    c.expect(counting::count_progression(x, q, s(a)) == counting::count_brute(x, q, s(a)),
                             ctx("count", {s(x), s(q), s(a)}));
                }
            }
        }
        for (int i = 0; i < 60; ++i) {
            const u64 x = uniform_below(rng, 20'001), q = 1 + uniform_below(rng, 300);
            const i64 a = s(uniform_below(rng, q));
            c.expect(counting::count_progression(x, q, a) == counting::count_brute(x, q, a),
                     ctx("count", {s(x), s(q), a}));
        }
        out.push_back(c.result());
    }
    {
        Check c("eta methods agree and rows sum to q^2");
        for (u64 q = 1; q <= 150; ++q) {
            u64 eta_sum = 0, omega_sum = 0;
            for (u64 a = 0; a < q; ++a) {
                const u64 conv = counting::eta(q, s(a), counting::EtaMethod::convolution);
                c.expect(conv == counting::eta(q, s(a), counting::EtaMethod::multiplicative),
                         ctx("multiplicative", {s(q), s(a)}));
                if (q <= 60) {
                    c.expect(conv == counting::eta(q, s(a), counting::EtaMethod::brute),
                             ctx("brute", {s(q), s(a)}));
                }
                eta_sum += conv;
                omega_sum += counting::omega(q, s(a));
            }
            c.expect(eta_sum == q * q && omega_sum == q, ctx("row", {s(q)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("progressions partition the disk");
        for (u64 q = 1; q <= 30; ++q) {
            const u64 x = 1000 + 37 * q;
            u64 total = 0;
            for (u64 a = 0; a < q; ++a) total += counting::count_progression(x, q, s(a)).total;
            c.expect(total == counting::count_progression(x, 1, 0).total, ctx("partition", {s(x), s(q)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("eta below 4 q tau(q), omega below 4 (q, a)^{1/2} tau(q)");
        for (u64 q = 1; q <= 300; ++q) {
            const counting::SqrtTable table(q);
            const double t = static_cast<double>(arith::tau(q));
            for (u64 a = 0; a < q; ++a) {
                const double g = std::sqrt(static_cast<double>(arith::gcd(q, a)));
                c.at_most(static_cast<double>(counting::eta(table, s(a))),
                          4.0 * static_cast<double>(q) * t, ctx("eta", {s(q), s(a)}));
                c.at_most(static_cast<double>(counting::omega(table, s(a))), 4.0 * t * g,
                          ctx("omega", {s(q), s(a)}));
            }
        }
        out.push_back(c.result());
    }
    return out;
}

std::vector<CheckResult> decomposition_suite(std::mt19937_64& rng) {
    using namespace decomposition;
    std::vector<CheckResult> out;
    {
        Check c("exact identities vanish");
        Check recon("reconstruction within the quadrature tolerance");
        for (int i = 0; i < 12; ++i) {
            const u64 x = 1 + uniform_below(rng, 20'000), q = 1 + uniform_below(rng, 40);
            const i64 a = s(uniform_below(rng, q));
            const auto rep = decompose(x, q, a);
            for (const char* label : kExactIdentities) {
                c.at_most(rep.residuals.at(label), 1e-6 * (1 + static_cast<double>(rep.total)),
                          ctx(label, {s(x), s(q), a}));
            }
            recon.at_most(rep.residuals.at("s1_0_reconstruction"), 10 * rep.quadrature_tol * (1 + static_cast<double>(x)),
                          ctx("s1_0_reconstruction", {s(x), s(q), a}));
        }
        out.push_back(c.result());
        out.push_back(recon.result());
    }
    {
        Check c("interval count identity");
        for (int i = 0; i < 2000; ++i) {
            const u64 q = 1 + uniform_below(rng, 100);
            const u64 gamma = 1 + uniform_below(rng, q);
            const double y = 1000.0 * uniform_unit(rng);
            c.at_most(ap_interval_count(y, q, gamma).residual, 1e-9, ctx("interval", {s(q), s(gamma)}));
        }
        out.push_back(c.result());
    }
    {
        Check c("truncated sawtooth error times max(1, M ||y||) below 2");
        for (int i = 0; i < 2000; ++i) {
            const double y = uniform_unit(rng);
            const i64 m = 2 + s(uniform_below(rng, 500));
            const double dist = std::min(y, 1 - y);
            if (dist == 0) continue;
            const double scale = std::max(1.0, static_cast<double>(m) * dist);
            c.at_most(std::abs(rho(y) - rho_truncated(y, m)) * scale, 2.0, "rho");
        }
        out.push_back(c.result());
    }
    {
        Check c("F sums agree with their H expansion");
        for (int i = 0; i < 20; ++i) {
            const u64 x = 1 + uniform_below(rng, 5000), q = 1 + uniform_below(rng, 30);
            const i64 a = s(uniform_below(rng, q)), n = s(uniform_below(rng, 2 * q)) - s(q);
            const double err = std::abs(f_sum(x, q, a, n) - f_sum_via_h(x, q, a, n));
            c.at_most(err, 1e-6 * (1 + std::sqrt(static_cast<double>(x)) * static_cast<double>(q)),
                      ctx("f", {s(x), s(q), a, n}));
        }
        out.push_back(c.result());
    }
    return out;
}

std::vector<CheckResult> bounds_suite(std::mt19937_64& rng) {
    using namespace bounds;
    std::vector<CheckResult> out;
    {
        Check c("bound formulas reproduce hand-computed values");
        const double l = std::log(1e6), l4 = l * l * l * l;
        auto rel = [](double got, double want) { return std::abs(got - want) / std::abs(want); };
        c.at_most(rel(bound_tolev(1'000'000, 100, 1), 110.0 * 6561.0 * l4), 1e-12, "tolev");
        c.at_most(rel(bound_tolev(1'000'000, 1, 0), 101.0 * l4), 1e-12, "tolev q=1");
        c.at_most(rel(*bound_varbanets(1'000'000, 10'000, 1, VarbanetsVariant::mid), 200.0 * l4), 1e-12,
                  "mid");
        c.expect(!bound_varbanets(1'000'000, 10, 1, VarbanetsVariant::mid), "mid below sqrt(x)");
        const auto strong = bound_varbanets(1'000'000, 8192, 1, VarbanetsVariant::strong);
        c.expect(strong.has_value(), "strong applies at q = 2^13");
        if (strong) {
            c.at_most(rel(*strong, (std::sqrt(8192.0) + 1000.0 / std::sqrt(8192.0) * 2.0) * l4), 1e-12,
                      "strong");
        }
        c.expect(!bound_varbanets(1'000'000, 65'536, 1, VarbanetsVariant::strong), "strong above x^{2/3}");
        c.at_most(rel(bound_smith(1'000'000, 100, 1, 0.1),
                      std::pow(10.0, 4.6) * std::pow(100.0, -0.65) * 9.0),
                  1e-12, "smith");
        out.push_back(c.result());
    }
    {
        Check c("sweep is deterministic, sorted and exact");
        SweepConfig config;
        config.x_values = {5'000, 50'000};
        config.q_rule.kind = ModulusRule::Kind::log_spaced;
        config.q_rule.count = 5;
        config.a_rule.kind = ResidueRule::Kind::random;
        config.a_rule.values = {0, 1};
        config.a_rule.count = 2;
        config.a_rule.seed = rng();
        const auto one = run_sweep(config);
        config.workers = 3;
        const auto three = run_sweep(config);
        c.expect(one == three, "worker count changed the records");
        for (std::size_t i = 0; i < one.size(); ++i) {
            const auto& r = one[i];
            if (i > 0) {
                c.expect(Cell{one[i - 1].x, one[i - 1].q, one[i - 1].a} < Cell{r.x, r.q, r.a}, "order");
            }
            c.expect(r.error.empty(), "error " + r.error);
            c.expect(r.s_total == counting::count_brute(r.x, r.q, s(r.a)).total,
                     ctx("total", {s(r.x), s(r.q), s(r.a)}));
            c.at_most(std::abs(r.r - (static_cast<double>(r.s_total) - r.main)), 1e-9 * (1 + r.main), "r");
        }
        std::stringstream csv;
        write_csv(csv, one);
        c.expect(read_csv(csv) == one, "csv round trip");
        out.push_back(c.result());
    }
    return out;
}

const std::map<std::string, std::function<std::vector<CheckResult>(std::mt19937_64&)>>& suites() {
    static const std::map<std::string, std::function<std::vector<CheckResult>(std::mt19937_64&)>> table{
        {"arith", arith_suite},
        {"expsums", expsums_suite},
        {"counting", counting_suite},
        {"decomposition", decomposition_suite},
        {"bounds", bounds_suite},
    };
    return table;
}

}  // namespace

std::size_t SuiteResult::passed() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.passed ? 1 : 0;
    return n;
}

std::size_t SuiteResult::failed() const { return checks.size() - passed(); }

const std::vector<std::string>& module_names() {
    static const std::vector<std::string> names{"arith", "expsums", "counting", "decomposition", "bounds"};
    return names;
}

SuiteResult run_suite(const std::string& module, u64 seed) {
    const auto it = suites().find(module);
    if (it == suites().end()) throw UsageError("unknown module '" + module + "'");
    std::mt19937_64 rng(seed);
    SuiteResult result{module, {}};
    try {
        result.checks = it->second(rng);
    } catch (const std::exception& e) {
        result.checks.push_back({"suite completed", false, e.what()});
    }
    return result;
}

}  // namespace apcircle::verify
