#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "apcircle/arith.hpp"
#include "apcircle/bounds.hpp"
#include "apcircle/counting.hpp"
#include "apcircle/errors.hpp"
#include "apcircle/rng.hpp"

namespace apcircle::bounds {

using u64 = std::uint64_t;

namespace {

// Largest q with q^3 <= x^2.
u64 two_thirds_floor(u64 x) {
    if (x == 0) return 0;
    u64 q = static_cast<u64>(std::cbrt(static_cast<double>(x) * static_cast<double>(x)));
    auto fits = [x](u64 c) {
        if (c >= (u64{1} << 42)) return false;
        using u128 = unsigned __int128;
        return static_cast<u128>(c) * c * c <= static_cast<u128>(x) * x;
    };
    while (q > 0 && !fits(q)) --q;
    while (fits(q + 1)) ++q;
    return q;
}

// Seeded per (seed, x, q) so each draw set is independent of grid order.
std::mt19937_64 make_rng(u64 seed, u64 x, u64 q) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(x),    static_cast<std::uint32_t>(x >> 32),
                      static_cast<std::uint32_t>(q),    static_cast<std::uint32_t>(q >> 32)};
    return std::mt19937_64(seq);
}

std::vector<u64> moduli_for(const ModulusRule& rule, u64 x) {
    std::vector<u64> out;
    const u64 top = two_thirds_floor(x);
    switch (rule.kind) {
        case ModulusRule::Kind::explicit_list:
            out = rule.values;
            break;
        case ModulusRule::Kind::powers_of_two:
            for (u64 q = 1; q <= top; q *= 2) {
                out.push_back(q);
                if (q > top / 2) break;
            }
            break;
        case ModulusRule::Kind::random: {
            if (top == 0) break;
            auto rng = make_rng(*rule.seed, x, 0);
            for (u64 i = 0; i < rule.count; ++i) out.push_back(1 + uniform_below(rng, top));
            break;
        }
        case ModulusRule::Kind::log_spaced: {
            if (top < 2) {
                if (top == 1) out.push_back(1);
                break;
            }
            const double ratio = static_cast<double>(top) / 2.0;
            for (u64 i = 0; i < rule.count; ++i) {
                const double frac =
                    rule.count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(rule.count - 1);
                const double v = std::round(2.0 * std::pow(ratio, frac));
                out.push_back(std::clamp(static_cast<u64>(v), u64{2}, top));
            }
            break;
        }
    }
    return out;
}

std::vector<u64> residues_for(const ResidueRule& rule, u64 x, u64 q) {
    std::vector<u64> out;
    switch (rule.kind) {
        case ResidueRule::Kind::fixed:
            for (auto a : rule.values) out.push_back(arith::reduce(a, q));
            break;
        case ResidueRule::Kind::all:
            for (u64 a = 0; a < q; ++a) out.push_back(a);
            break;
        case ResidueRule::Kind::random: {
            for (auto a : rule.values) out.push_back(arith::reduce(a, q));
            auto rng = make_rng(*rule.seed, x, q);
            for (u64 i = 0; i < rule.count; ++i) out.push_back(uniform_below(rng, q));
            break;
        }
    }
    return out;
}

SweepRecord evaluate_with(const counting::SqrtTable* table, const Cell& cell, double xi) {
    SweepRecord rec;
    rec.x = cell.x;
    rec.q = cell.q;
    rec.a = cell.a;
    rec.nontrivial = nontrivial_regime(cell.x, cell.q);
    const auto a = static_cast<std::int64_t>(cell.a);
    try {
        const auto built = table ? std::optional<counting::SqrtTable>{}
                                 : std::optional<counting::SqrtTable>{counting::build_sqrt_table(cell.q)};
        const counting::SqrtTable& t = table ? *table : *built;
        const auto count = counting::count_progression(t, cell.x, a);
        rec.s_total = count.total;
        rec.quadrant = count.quadrant;
        rec.axis = count.axis;
        rec.origin = count.origin;
        rec.eta = counting::eta(t, a);
        rec.omega = counting::omega(t, a);
        rec.main = counting::main_term_from_eta(cell.x, cell.q, rec.eta);
        rec.r = static_cast<double>(rec.s_total) - rec.main;

        rec.bound[static_cast<int>(BoundKind::tolev)] = bound_tolev(cell.x, cell.q, a);
        rec.bound[static_cast<int>(BoundKind::smith)] = bound_smith(cell.x, cell.q, a, xi);
        rec.bound[static_cast<int>(BoundKind::v_mid)] =
            bound_varbanets(cell.x, cell.q, a, VarbanetsVariant::mid).value_or(kInapplicable);
        rec.bound[static_cast<int>(BoundKind::v_strong)] =
            bound_varbanets(cell.x, cell.q, a, VarbanetsVariant::strong).value_or(kInapplicable);
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    for (int b = 0; b < 4; ++b) {
        rec.ratio[b] = std::isfinite(rec.bound[b]) ? std::abs(rec.r) / rec.bound[b] : 0.0;
    }
    return rec;
}

std::string sanitize(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; }, ';');
    return s;
}

template <typename T>
T parse_int(const std::string& field, const char* column) {
    T v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DomainError(std::string("csv: bad integer in column ") + column + ": '" + field + "'");
    }
    return v;
}

double parse_real(const std::string& field, const char* column) {
    double v{};
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DomainError(std::string("csv: bad real in column ") + column + ": '" + field + "'");
    }
    return v;
}

int decade_of(u64 x) {
    int d = 0;
    while (x >= 10) {
        x /= 10;
        ++d;
    }
    return d;
}

}  // namespace

void validate(const SweepConfig& config) {
    if (!(config.smith_xi > 0.0 && config.smith_xi < 1.0 / 3.0)) {
        throw DomainError("smith_xi must lie strictly between 0 and 1/3");
    }
    if (config.workers == 0) throw DomainError("workers must be positive");
    const auto& q = config.q_rule;
    if (q.kind == ModulusRule::Kind::random && !q.seed) throw DomainError("random q_rule needs a seed");
    if ((q.kind == ModulusRule::Kind::random || q.kind == ModulusRule::Kind::log_spaced) && q.count == 0) {
        throw DomainError("q_rule count must be positive");
    }
    if (q.kind == ModulusRule::Kind::explicit_list) {
        for (auto v : q.values) {
            if (v == 0) throw DomainError("q values must be positive");
        }
    }
    const auto& a = config.a_rule;
    if (a.kind == ResidueRule::Kind::random && !a.seed) throw DomainError("random a_rule needs a seed");
}

std::vector<Cell> expand_grid(const SweepConfig& config) {
    validate(config);
    std::set<Cell> cells;
    for (u64 x : config.x_values) {
        for (u64 q : moduli_for(config.q_rule, x)) {
            for (u64 a : residues_for(config.a_rule, x, q)) cells.insert({x, q, a});
        }
    }
    return {cells.begin(), cells.end()};
}

SweepRecord evaluate_cell(const Cell& cell, double smith_xi) {
    return evaluate_with(nullptr, cell, smith_xi);
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) {
    const auto cells = expand_grid(config);
    std::vector<SweepRecord> records(cells.size());

    // One group per modulus so each table is built once.
    std::map<u64, std::vector<std::size_t>> by_q;
    for (std::size_t i = 0; i < cells.size(); ++i) by_q[cells[i].q].push_back(i);
    std::vector<const std::vector<std::size_t>*> groups;
    for (const auto& [q, idx] : by_q) groups.push_back(&idx);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t g = next++; g < groups.size(); g = next++) {
            const auto& idx = *groups[g];
            std::optional<counting::SqrtTable> table;
            try {
                table.emplace(counting::build_sqrt_table(cells[idx.front()].q));
            } catch (const std::exception&) {
                // evaluate_with records the same failure per cell.
            }
            for (std::size_t i : idx) {
                records[i] = evaluate_with(table ? &*table : nullptr, cells[i], config.smith_xi);
            }
        }
    };
    const unsigned workers = std::min<std::size_t>(config.workers, std::max<std::size_t>(groups.size(), 1));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    if (!config.output_path.empty()) write_csv_file(config.output_path, records);
    return records;
}

std::string format_real(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    (void)ec;
    return {buf, ptr};
}

void write_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.x << ',' << r.q << ',' << r.a << ',' << r.s_total << ',' << r.quadrant << ','
            << r.axis << ',' << r.origin << ',' << r.eta << ',' << r.omega << ','
            << format_real(r.main) << ',' << format_real(r.r);
        for (int b = 0; b < 4; ++b) {
            out << ',';
            if (std::isfinite(r.bound[b])) out << format_real(r.bound[b]);
            out << ',' << format_real(r.ratio[b]);
        }
        out << ',' << (r.nontrivial ? "nontrivial" : "trivial") << ',' << sanitize(r.error) << '\n';
    }
}

void write_csv_file(const std::string& path, const std::vector<SweepRecord>& records) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot open " + tmp.string() + " for writing");
        write_csv(out, records);
        out.flush();
        if (!out) throw DomainError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

std::vector<SweepRecord> read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyInput("csv: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw DomainError("csv: unexpected header");

    std::vector<SweepRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 21) throw DomainError("csv: expected 21 fields, got " + std::to_string(f.size()));

        SweepRecord r;
        r.x = parse_int<u64>(f[0], "x");
        r.q = parse_int<u64>(f[1], "q");
        r.a = parse_int<u64>(f[2], "a");
        r.s_total = parse_int<u64>(f[3], "s_total");
        r.quadrant = parse_int<u64>(f[4], "quadrant");
        r.axis = parse_int<u64>(f[5], "axis");
        r.origin = parse_int<u64>(f[6], "origin");
        r.eta = parse_int<u64>(f[7], "eta");
        r.omega = parse_int<u64>(f[8], "omega");
        r.main = parse_real(f[9], "main");
        r.r = parse_real(f[10], "r");
        for (int b = 0; b < 4; ++b) {
            const auto& bound = f[11 + 2 * b];
            r.bound[b] = bound.empty() ? kInapplicable : parse_real(bound, kBoundNames[b]);
            r.ratio[b] = parse_real(f[12 + 2 * b], kBoundNames[b]);
        }
        if (f[19] == "nontrivial") {
            r.nontrivial = true;
        } else if (f[19] == "trivial") {
            r.nontrivial = false;
        } else {
            throw DomainError("csv: bad regime '" + f[19] + "'");
        }
        r.error = f[20];
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<SweepRecord> read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open " + path);
    return read_csv(in);
}

ConstantsReport report_constants(const std::vector<SweepRecord>& records) {
    if (records.empty()) throw EmptyInput("report_constants: no records");
    ConstantsReport rep;
    rep.records = records.size();
    std::array<std::map<int, double>, 4> decades;
    for (const auto& r : records) {
        if (!r.error.empty()) {
            ++rep.errors;
            continue;
        }
        const int decade = decade_of(r.x);
        for (int b = 0; b < 4; ++b) {
            auto& slot = decades[b].try_emplace(decade, 0.0).first->second;
            if (!std::isfinite(r.bound[b])) continue;
            auto& s = rep.bounds[b];
            ++s.applicable;
            if (!s.argmax || r.ratio[b] > s.max_ratio) {
                s.max_ratio = r.ratio[b];
                s.argmax = Cell{r.x, r.q, r.a};
            }
            slot = std::max(slot, r.ratio[b]);
        }
    }
    for (int b = 0; b < 4; ++b) {
        rep.bounds[b].per_decade.assign(decades[b].begin(), decades[b].end());
    }
    return rep;
}

void print_report(std::ostream& out, const ConstantsReport& report) {
    out << "records: " << report.records << '\n';
    out << "errors: " << report.errors << '\n';
    for (int b = 0; b < 4; ++b) {
        const auto& s = report.bounds[b];
        out << "bound " << kBoundNames[b] << ": applicable " << s.applicable << ", max_ratio "
            << format_real(s.max_ratio);
        if (s.argmax) {
            out << " at x=" << s.argmax->x << " q=" << s.argmax->q << " a=" << s.argmax->a;
        }
        out << '\n';
        for (const auto& [decade, value] : s.per_decade) {
            out << "  decade " << decade << ": " << format_real(value) << '\n';
        }
    }
}

}  // namespace apcircle::bounds
