#include "apcircle/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>
#include <type_traits>

#include "apcircle/arith.hpp"
#include "apcircle/errors.hpp"
#include "apcircle/verify.hpp"

namespace apcircle::cli {

using bounds::format_real;
using u64 = std::uint64_t;
using i64 = std::int64_t;

namespace {

template <typename T>
void line(std::ostream& out, const char* key, const T& value) {
    out << key << ": " << value << '\n';
}

void real_line(std::ostream& out, const char* key, double value) { line(out, key, format_real(value)); }

const char* verdict(bool ok) { return ok ? "OK" : "FAIL"; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("--config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_unsigned_value(const nlohmann::json& v) {
    if (v.is_array()) return std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number_unsigned(); });
    return v.is_number_unsigned();
}

template <typename T>
T json_get(const nlohmann::json& j, const char* key) {
    if constexpr (std::is_same_v<T, u64> || std::is_same_v<T, std::vector<u64>> || std::is_same_v<T, unsigned>) {
        if (!is_unsigned_value(j.at(key)))
            throw UsageError(std::string("config key '") + key + "': expected non-negative integers");
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
}

int run_verify(const VerifyArgs& args, u64 seed, std::ostream& out) {
    std::vector<std::string> modules;
    if (args.module == "all") {
        modules = verify::module_names();
    } else {
        modules = {args.module};
    }
    line(out, "seed", seed);
    std::size_t passed = 0, failed = 0;
    for (const auto& module : modules) {
        const auto suite = verify::run_suite(module, seed);
        for (const auto& check : suite.checks) {
            out << (check.passed ? "PASS " : "FAIL ") << module << ": " << check.name;
            if (!check.detail.empty()) out << " (" << check.detail << ')';
            out << '\n';
        }
        passed += suite.passed();
        failed += suite.failed();
    }
    line(out, "passed", passed);
    line(out, "failed", failed);
    return failed == 0 ? kExitOk : kExitFailed;
}

int run_decompose(const DecomposeArgs& args, std::ostream& out) {
    const auto rep = decomposition::decompose(args.x, args.q, args.a, args.options);
    line(out, "x", rep.x);
    line(out, "q", rep.q);
    line(out, "a", rep.a);
    line(out, "total", rep.total);
    line(out, "quadrant", rep.quadrant);
    line(out, "axis", rep.axis);
    line(out, "origin", rep.origin);
    line(out, "eta", rep.eta);
    line(out, "omega", rep.omega);
    line(out, "s1", rep.s1);
    line(out, "s2", rep.s2);
    real_line(out, "s1_0", rep.s1_0);
    real_line(out, "s1_1", rep.s1_1);
    real_line(out, "s1_2", rep.s1_2);
    real_line(out, "s2_0", rep.s2_0);
    real_line(out, "s2_1", rep.s2_1);
    real_line(out, "n_top", rep.frak_n);
    real_line(out, "n_zero", rep.frak_n0);
    real_line(out, "d_sum", rep.frak_d);
    real_line(out, "gamma_sum", rep.gamma_sum);
    real_line(out, "gamma_error", rep.gamma_error);
    real_line(out, "quadrature_tol", rep.quadrature_tol);
    line(out, "fourier_m", rep.fourier_m);
    line(out, "fourier_m1", rep.fourier_m1);
    real_line(out, "s1_1_truncated", rep.s1_1_truncated);
    real_line(out, "d_sum_truncated", rep.frak_d_truncated);
    for (const auto& [label, value] : rep.residuals) {
        out << "residual " << label << ": " << format_real(value) << '\n';
    }
    const auto ratios = decomposition::pipeline_ratios(rep);
    real_line(out, "ratio_s1_1", ratios.s1_1);
    real_line(out, "ratio_d_sum", ratios.frak_d);
    real_line(out, "ratio_gamma_sum", ratios.gamma_sum);

    bool exact = true;
    for (const char* label : decomposition::kExactIdentities) {
        exact = exact && rep.residuals.at(label) <= 1e-6 * (1.0 + static_cast<double>(rep.total));
    }
    const bool reconstruction =
        rep.residuals.at("s1_0_reconstruction") <= 10.0 * rep.quadrature_tol * (1.0 + static_cast<double>(rep.x));
    line(out, "exact_identities", verdict(exact));
    line(out, "reconstruction", verdict(reconstruction));
    return exact && reconstruction ? kExitOk : kExitFailed;
}

int run_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
    const auto records = bounds::run_sweep(args.config);
    std::size_t errors = 0;
    for (const auto& r : records) {
        if (!r.error.empty()) {
            ++errors;
            err << "cell x=" << r.x << " q=" << r.q << " a=" << r.a << ": " << r.error << '\n';
        }
    }
    if (args.config.output_path.empty()) {
        bounds::write_csv(out, records);
        return kExitOk;
    }
    line(out, "output", args.config.output_path);
    if (!records.empty()) bounds::print_report(out, bounds::report_constants(records));
    else line(out, "records", 0);
    return kExitOk;
}

int dispatch(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    return std::visit(
        [&](const auto& args) -> int {
            using T = std::decay_t<decltype(args)>;
            if constexpr (std::is_same_v<T, CountArgs>) {
                const auto c = counting::count_progression(args.x, args.q, args.a);
                const u64 eta = counting::eta(args.q, args.a, counting::EtaMethod::multiplicative);
                const double main = counting::main_term_from_eta(args.x, args.q, eta);
                line(out, "x", c.x);
                line(out, "q", c.q);
                line(out, "a", c.a);
                line(out, "total", c.total);
                line(out, "quadrant", c.quadrant);
                line(out, "axis", c.axis);
                line(out, "origin", c.origin);
                line(out, "eta", eta);
                real_line(out, "main", main);
                real_line(out, "remainder", static_cast<double>(c.total) - main);
                return kExitOk;
            } else if constexpr (std::is_same_v<T, EtaArgs>) {
                line(out, "eta", counting::eta(args.q, args.a, args.method));
                return kExitOk;
            } else if constexpr (std::is_same_v<T, OmegaArgs>) {
                line(out, "omega", counting::omega(args.q, args.a));
                return kExitOk;
            } else if constexpr (std::is_same_v<T, GaussArgs>) {
                const auto v = args.direct ? expsums::gauss_direct(args.q, args.k, args.m)
                                           : expsums::gauss_closed(args.q, args.k, args.m);
                const double bound = expsums::gauss_bound_value(args.q, args.k);
                real_line(out, "re", v.real());
                real_line(out, "im", v.imag());
                real_line(out, "bound", bound);
                const bool ok = std::abs(v) <= bound + 1e-9;
                line(out, "check", verdict(ok));
                return ok ? kExitOk : kExitFailed;
            } else if constexpr (std::is_same_v<T, KloostermanArgs>) {
                const auto v = expsums::kloosterman_direct(args.q, args.k, args.n);
                const double bound = expsums::weil_bound_value(args.q, args.k, args.n);
                real_line(out, "re", v.real());
                real_line(out, "im", v.imag());
                real_line(out, "bound", bound);
                const bool ok = std::abs(v) <= bound + 1e-9;
                line(out, "check", verdict(ok));
                return ok ? kExitOk : kExitFailed;
            } else if constexpr (std::is_same_v<T, HsumArgs>) {
                const auto v = args.direct ? expsums::h_direct(args.query) : expsums::h_fast(args.query);
                const double bound = expsums::h_bound_value(args.query, args.mode);
                real_line(out, "re", v.real());
                real_line(out, "im", v.imag());
                real_line(out, "bound", bound);
                const bool ok = std::abs(v) <= bound + 1e-9;
                line(out, "check", verdict(ok));
                return ok ? kExitOk : kExitFailed;
            } else if constexpr (std::is_same_v<T, DecomposeArgs>) {
                return run_decompose(args, out);
            } else if constexpr (std::is_same_v<T, VerifyArgs>) {
                return run_verify(args, spec.seed.value_or(verify::kDefaultSeed), out);
            } else if constexpr (std::is_same_v<T, SweepArgs>) {
                return run_sweep(args, out, err);
            } else {
                const auto records = bounds::read_csv_file(args.input);
                bounds::print_report(out, bounds::report_constants(records));
                return kExitOk;
            }
        },
        spec.args);
}

}  // namespace

unsigned default_workers() {
    if (const char* env = std::getenv("APCIRCLE_WORKERS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

bounds::SweepConfig sweep_config_from_json(const std::string& text, unsigned default_workers_value) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("--config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw UsageError("--config: top level must be an object");
    static const std::vector<std::string> known{"x_values", "q_rule",   "q_values", "q_count",
                                                "q_seed",   "a_rule",   "a_values", "a_count",
                                                "a_seed",   "smith_xi", "workers",  "output_path"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw UsageError("--config: unknown key '" + key + "'");
        }
    }

    bounds::SweepConfig c;
    c.workers = default_workers_value;
    if (j.contains("x_values")) c.x_values = json_get<std::vector<u64>>(j, "x_values");

    using QK = bounds::ModulusRule::Kind;
    const std::string q_rule = j.contains("q_rule") ? json_get<std::string>(j, "q_rule") : "explicit";
    if (q_rule == "explicit") {
        c.q_rule.kind = QK::explicit_list;
    } else if (q_rule == "powers_of_two") {
        c.q_rule.kind = QK::powers_of_two;
    } else if (q_rule == "random") {
        c.q_rule.kind = QK::random;
    } else if (q_rule == "log_spaced") {
        c.q_rule.kind = QK::log_spaced;
    } else {
        throw UsageError("config key 'q_rule': unknown rule '" + q_rule + "'");
    }
    if (j.contains("q_values")) c.q_rule.values = json_get<std::vector<u64>>(j, "q_values");
    if (j.contains("q_count")) c.q_rule.count = json_get<u64>(j, "q_count");
    if (j.contains("q_seed")) c.q_rule.seed = json_get<u64>(j, "q_seed");

    using AK = bounds::ResidueRule::Kind;
    const std::string a_rule = j.contains("a_rule") ? json_get<std::string>(j, "a_rule") : "fixed";
    if (a_rule == "fixed") {
        c.a_rule.kind = AK::fixed;
    } else if (a_rule == "all") {
        c.a_rule.kind = AK::all;
    } else if (a_rule == "random") {
        c.a_rule.kind = AK::random;
    } else {
        throw UsageError("config key 'a_rule': unknown rule '" + a_rule + "'");
    }
    if (j.contains("a_values")) c.a_rule.values = json_get<std::vector<i64>>(j, "a_values");
    if (j.contains("a_count")) c.a_rule.count = json_get<u64>(j, "a_count");
    if (j.contains("a_seed")) c.a_rule.seed = json_get<u64>(j, "a_seed");

    if (j.contains("smith_xi")) c.smith_xi = json_get<double>(j, "smith_xi");
    if (j.contains("workers")) c.workers = json_get<unsigned>(j, "workers");
    if (j.contains("output_path")) c.output_path = json_get<std::string>(j, "output_path");

    try {
        bounds::validate(c);
    } catch (const DomainError& e) {
        throw UsageError(std::string("--config: ") + e.what());
    }
    return c;
}

CommandSpec parse_args(const std::vector<std::string>& argv) {
    CLI::App app{"Lattice points of the disk in arithmetic progressions", "apcircle"};
    app.require_subcommand(1);

    CountArgs count;
    auto* count_cmd = app.add_subcommand("count", "S_{q,a}(x) with its main term and remainder");
    count_cmd->add_option("--x", count.x, "radius squared")->required();
    count_cmd->add_option("--q", count.q, "modulus")->required()->check(CLI::PositiveNumber);
    count_cmd->add_option("--a", count.a, "residue")->required();

    EtaArgs eta;
    std::string eta_method = "convolution";
    auto* eta_cmd = app.add_subcommand("eta", "#{alpha, beta mod q : alpha^2 + beta^2 = a}");
    eta_cmd->add_option("--q", eta.q, "modulus")->required()->check(CLI::PositiveNumber);
    eta_cmd->add_option("--a", eta.a, "residue")->required();
    eta_cmd->add_option("--method", eta_method, "convolution, brute or multiplicative")
        ->check(CLI::IsMember({"convolution", "brute", "multiplicative"}));

    OmegaArgs omega;
    auto* omega_cmd = app.add_subcommand("omega", "#{alpha mod q : alpha^2 = a}");
    omega_cmd->add_option("--q", omega.q, "modulus")->required()->check(CLI::PositiveNumber);
    omega_cmd->add_option("--a", omega.a, "residue")->required();

    GaussArgs gauss;
    auto* gauss_cmd = app.add_subcommand("gauss", "quadratic Gauss sum S(q; k, m)");
    gauss_cmd->add_option("--q", gauss.q, "modulus")->required()->check(CLI::PositiveNumber);
    gauss_cmd->add_option("--k", gauss.k, "quadratic coefficient")->required();
    gauss_cmd->add_option("--m", gauss.m, "linear coefficient")->default_val(0);
    gauss_cmd->add_flag("--direct", gauss.direct, "sum term by term instead of the closed form");

    KloostermanArgs kloos;
    auto* kloos_cmd = app.add_subcommand("kloosterman", "Kloosterman sum K(q; k, n)");
    kloos_cmd->add_option("--q", kloos.q, "modulus")->required()->check(CLI::PositiveNumber);
    kloos_cmd->add_option("--k", kloos.k, "first frequency")->required();
    kloos_cmd->add_option("--n", kloos.n, "second frequency")->required();

    HsumArgs hsum;
    std::string hsum_mode = "full";
    auto* hsum_cmd = app.add_subcommand("hsum", "bilinear sum H_{h,n}(q, a)");
    hsum_cmd->set_help_flag("--help", "print this help message and exit");
    hsum_cmd->add_option("--q", hsum.query.q, "modulus")->required()->check(CLI::PositiveNumber);
    hsum_cmd->add_option("--a", hsum.query.a, "residue")->required();
    hsum_cmd->add_option("--h", hsum.query.h, "first frequency")->required();
    hsum_cmd->add_option("--n", hsum.query.n, "second frequency")->required();
    hsum_cmd->add_option("--bound", hsum_mode, "full or simplified")
        ->check(CLI::IsMember({"full", "simplified"}));
    hsum_cmd->add_flag("--direct", hsum.direct, "walk the solution set instead of the CRT split");

    DecomposeArgs decompose;
    auto* dec_cmd = app.add_subcommand("decompose", "every term of the sawtooth decomposition");
    dec_cmd->add_option("--x", decompose.x, "radius squared")->required();
    dec_cmd->add_option("--q", decompose.q, "modulus")->required()->check(CLI::PositiveNumber);
    dec_cmd->add_option("--a", decompose.a, "residue")->required();
    dec_cmd->add_option("--tol", decompose.options.quadrature_tol, "quadrature tolerance")
        ->check(CLI::PositiveNumber);
    dec_cmd->add_option("--fourier-m", decompose.options.fourier_m, "sawtooth truncation")
        ->check(CLI::Range(std::int64_t{2}, std::numeric_limits<std::int64_t>::max()));
    dec_cmd->add_option("--fourier-m1", decompose.options.fourier_m1, "double-sum truncation")
        ->check(CLI::Range(std::int64_t{2}, std::numeric_limits<std::int64_t>::max()));

    VerifyArgs verify_args;
    std::optional<u64> seed;
    auto* verify_cmd = app.add_subcommand("verify", "run a module's property suite");
    std::vector<std::string> module_choices = verify::module_names();
    module_choices.push_back("all");
    verify_cmd->add_option("--module", verify_args.module, "module name or all")
        ->required()
        ->check(CLI::IsMember(module_choices));
    verify_cmd->add_option("--seed", seed, "random seed");

    std::string config_path;
    std::optional<unsigned> workers;
    std::optional<std::string> output;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid experiment from a JSON config");
    sweep_cmd->add_option("--config", config_path, "JSON config")->required();
    sweep_cmd->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--output", output, "CSV path, overrides the config");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "constant summary of a sweep CSV");
    report_cmd->add_option("--input", report.input, "CSV written by sweep")->required();

    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CommandSpec spec;
    spec.subcommand = app.get_subcommands().front()->get_name();
    if (count_cmd->parsed()) {
        spec.args = count;
    } else if (eta_cmd->parsed()) {
        eta.method = eta_method == "brute"            ? counting::EtaMethod::brute
                     : eta_method == "multiplicative" ? counting::EtaMethod::multiplicative
                                                      : counting::EtaMethod::convolution;
        spec.args = eta;
    } else if (omega_cmd->parsed()) {
        spec.args = omega;
    } else if (gauss_cmd->parsed()) {
        spec.args = gauss;
    } else if (kloos_cmd->parsed()) {
        spec.args = kloos;
    } else if (hsum_cmd->parsed()) {
        hsum.mode = hsum_mode == "simplified" ? expsums::HBoundMode::simplified : expsums::HBoundMode::full;
        spec.args = hsum;
    } else if (dec_cmd->parsed()) {
        spec.args = decompose;
    } else if (verify_cmd->parsed()) {
        spec.args = verify_args;
        spec.seed = seed;
    } else if (sweep_cmd->parsed()) {
        SweepArgs sweep{sweep_config_from_json(read_file(config_path), default_workers())};
        if (workers) sweep.config.workers = *workers;
        if (output) sweep.config.output_path = *output;
        spec.args = sweep;
    } else {
        spec.args = report;
    }
    return spec;
}

int run(const CommandSpec& spec, std::ostream& out, std::ostream& err) { return dispatch(spec, out, err); }

int main_entry(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    try {
        return run(parse_args(argv), out, err);
    } catch (const HelpRequested& help) {
        out << help.text;
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const QuadratureFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailed;
    }
}

}  // namespace apcircle::cli
