#include "apcircle/counting.hpp"

#include <numbers>
#include <string>

#include "apcircle/arith.hpp"
#include "apcircle/errors.hpp"

namespace apcircle::counting {

using arith::reduce;
using u64 = std::uint64_t;

SqrtTable::SqrtTable(u64 q) : q_(q) {
    if (q == 0) throw DomainError("SqrtTable: modulus must be positive");
    if (q > kMaxTableModulus) {
        throw ModulusTooLarge("SqrtTable: modulus " + std::to_string(q) + " exceeds " +
                              std::to_string(kMaxTableModulus));
    }
    // Counting sort of beta = 1..q by beta^2 mod q keeps each bucket sorted.
    std::vector<std::uint32_t> square(q);
    offsets_.assign(q + 1, 0);
    for (u64 beta = 1; beta <= q; ++beta) {
        u64 r = beta * beta % q;
        square[beta - 1] = static_cast<std::uint32_t>(r);
        ++offsets_[r + 1];
    }
    for (u64 r = 0; r < q; ++r) offsets_[r + 1] += offsets_[r];
    roots_.resize(q);
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (u64 beta = 1; beta <= q; ++beta) {
        roots_[fill[square[beta - 1]]++] = static_cast<std::uint32_t>(beta);
    }
}

SqrtTable build_sqrt_table(u64 q) { return SqrtTable(q); }

u64 omega(u64 q, std::int64_t a) {
    if (q == 0) throw DomainError("omega: modulus must be positive");
    const u64 r = reduce(a, q);
    u64 count = 0;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        if (arith::mul_mod(alpha, alpha, q) == r) ++count;
    }
    return count;
}

u64 omega(const SqrtTable& table, std::int64_t a) {
    return table.count(reduce(a, table.modulus()));
}

u64 eta(const SqrtTable& table, std::int64_t a) {
    const u64 q = table.modulus();
    const u64 target = reduce(a, q);
    u64 total = 0;
    for (u64 r = 0; r < q; ++r) {
        u64 other = target >= r ? target - r : target + q - r;
        total += table.count(r) * table.count(other);
    }
    return total;
}

std::vector<u64> eta_row(const SqrtTable& table) {
    const u64 q = table.modulus();
    std::vector<u64> squares;
    for (u64 r = 0; r < q; ++r) {
        if (table.count(r) != 0) squares.push_back(r);
    }
    std::vector<u64> row(q, 0);
    for (u64 r : squares) {
        const u64 cr = table.count(r);
        for (u64 t : squares) {
            const u64 sum = r + t;
            row[sum >= q ? sum - q : sum] += cr * table.count(t);
        }
    }
    return row;
}

namespace {

u64 eta_brute(u64 q, u64 target) {
    if (q > kMaxBruteEta) {
        throw BruteTooLarge("eta: brute method limited to q <= " + std::to_string(kMaxBruteEta));
    }
    u64 count = 0;
    for (u64 alpha = 1; alpha <= q; ++alpha) {
        const u64 a2 = alpha * alpha % q;
        for (u64 beta = 1; beta <= q; ++beta) {
            if ((a2 + beta * beta % q) % q == target) ++count;
        }
    }
    return count;
}

}  // namespace

u64 eta(u64 q, std::int64_t a, EtaMethod method) {
    if (q == 0) throw DomainError("eta: modulus must be positive");
    switch (method) {
        case EtaMethod::brute:
            return eta_brute(q, reduce(a, q));
        case EtaMethod::convolution:
            return eta(SqrtTable(q), a);
        case EtaMethod::multiplicative: {
            u64 product = 1;
            for (const auto& [p, e] : arith::factorize(q).factors) {
                const u64 block = arith::ipow(p, e);
                product *= eta(SqrtTable(block), static_cast<std::int64_t>(reduce(a, block)));
                if (product == 0) break;
            }
            return product;
        }
    }
    return 0;
}

CountResult count_brute(u64 x, u64 q, std::int64_t a) {
    if (q == 0) throw DomainError("count_brute: modulus must be positive");
    if (x > kMaxBruteCount) {
        throw InputTooLarge("count_brute: x = " + std::to_string(x) + " exceeds " +
                            std::to_string(kMaxBruteCount));
    }
    const u64 target = reduce(a, q);
    CountResult res{x, q, target, 0, 0, 0, 0};
    const std::int64_t radius = static_cast<std::int64_t>(arith::isqrt(x));
    for (std::int64_t u = -radius; u <= radius; ++u) {
        const u64 u2 = static_cast<u64>(u * u);
        const std::int64_t ymax = static_cast<std::int64_t>(arith::isqrt(x - u2));
        // Walk v upward carrying (u^2 + v^2) mod q and (2v + 1) mod q.
        u64 residue = (u2 % q + static_cast<u64>(ymax * ymax) % q) % q;
        u64 step = reduce(-2 * ymax + 1, q);
        for (std::int64_t v = -ymax; v <= ymax; ++v) {
            if (residue == target) {
                ++res.total;
                if (u > 0 && v > 0) ++res.quadrant;
                else if (u > 0 && v == 0) ++res.axis;
                else if (u == 0 && v == 0) ++res.origin;
            }
            residue += step;
            while (residue >= q) residue -= q;
            step += 2;
            while (step >= q) step -= q;
        }
    }
    return res;
}

CountResult count_progression(const SqrtTable& table, u64 x, std::int64_t a) {
    const u64 q = table.modulus();
    if (x > kMaxProgressionX) {
        throw InputTooLarge("count_progression: x = " + std::to_string(x) + " exceeds 10^16");
    }
    const u64 target = reduce(a, q);
    CountResult res{x, q, target, 0, 0, 0, target == 0 ? 1u : 0u};

    const u64 radius = arith::isqrt(x);
    for (std::uint32_t beta : table.roots(target)) {
        if (beta > radius) break;
        res.axis += (radius - beta) / q + 1;
    }

    if (x >= 2) {
        const u64 umax = arith::isqrt(x - 1);
        u64 y = umax;  // y_u = isqrt(x - u^2), nonincreasing in u
        for (u64 u = 1; u <= umax; ++u) {
            const u64 rest = x - u * u;
            while (y * y > rest) --y;
            const u64 u2 = u * u % q;
            const u64 need = target >= u2 ? target - u2 : target + q - u2;
            for (std::uint32_t beta : table.roots(need)) {
                if (beta > y) break;
                res.quadrant += (y - beta) / q + 1;
            }
        }
    }
    res.total = 4 * res.quadrant + 4 * res.axis + res.origin;
    return res;
}

CountResult count_progression(u64 x, u64 q, std::int64_t a) {
    if (x > kMaxProgressionX) {
        throw InputTooLarge("count_progression: x = " + std::to_string(x) + " exceeds 10^16");
    }
    return count_progression(SqrtTable(q), x, a);
}

double main_term_from_eta(u64 x, u64 q, u64 eta_value) {
    const double qd = static_cast<double>(q);
    return std::numbers::pi * static_cast<double>(eta_value) * static_cast<double>(x) / (qd * qd);
}

double main_term(u64 x, u64 q, std::int64_t a) {
    return main_term_from_eta(x, q, eta(q, a, EtaMethod::multiplicative));
}

double remainder_value(u64 x, u64 q, std::int64_t a) {
    const SqrtTable table(q);
    const CountResult c = count_progression(table, x, a);
    return static_cast<double>(c.total) - main_term_from_eta(x, q, eta(table, a));
}

}  // namespace apcircle::counting
