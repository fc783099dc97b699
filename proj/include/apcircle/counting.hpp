#pragma once

/**
 * @file counting.hpp
 * @brief Lattice points of the disk u^2 + v^2 <= x in the class a (mod q).
 *
 * S_{q,a}(x) is the number of integer pairs (u, v), origin included, with
 * u^2 + v^2 <= x and u^2 + v^2 = a (mod q).  Its exact split is
 *
 *     S = 4 * quadrant + 4 * axis + origin
 *
 * where quadrant counts u, v >= 1, axis counts u >= 1 with u^2 = a (mod q)
 * and u <= sqrt(x), and origin is [q | a].
 */

#include <cstdint>
#include <span>
#include <vector>

namespace apcircle::counting {

inline constexpr std::uint64_t kMaxTableModulus = 10'000'000;
inline constexpr std::uint64_t kMaxBruteEta = 3000;
inline constexpr std::uint64_t kMaxBruteCount = 100'000'000;
inline constexpr std::uint64_t kMaxProgressionX = 10'000'000'000'000'000;

/// Square roots modulo q: for each residue r, the sorted beta in [1, q] with
/// beta^2 = r (mod q).  beta = q stands for the root 0.
class SqrtTable {
public:
    explicit SqrtTable(std::uint64_t q);

    std::uint64_t modulus() const { return q_; }

    std::span<const std::uint32_t> roots(std::uint64_t r) const {
        return {roots_.data() + offsets_[r], roots_.data() + offsets_[r + 1]};
    }

    std::uint64_t count(std::uint64_t r) const { return offsets_[r + 1] - offsets_[r]; }

private:
    std::uint64_t q_;
    std::vector<std::uint32_t> offsets_;
    std::vector<std::uint32_t> roots_;
};

/// Throws ModulusTooLarge above kMaxTableModulus.
SqrtTable build_sqrt_table(std::uint64_t q);

struct CountResult {
    std::uint64_t x;
    std::uint64_t q;
    std::uint64_t a;  // reduced into [0, q)
    std::uint64_t total;
    std::uint64_t quadrant;
    std::uint64_t axis;
    std::uint64_t origin;

    friend bool operator==(const CountResult&, const CountResult&) = default;
};

enum class EtaMethod { convolution, brute, multiplicative };

std::uint64_t omega(std::uint64_t q, std::int64_t a);
std::uint64_t omega(const SqrtTable& table, std::int64_t a);

std::uint64_t eta(std::uint64_t q, std::int64_t a, EtaMethod method = EtaMethod::convolution);
std::uint64_t eta(const SqrtTable& table, std::int64_t a);

/// eta_a(q) for every a in [0, q), indexed by a.
std::vector<std::uint64_t> eta_row(const SqrtTable& table);

/// Every pair in the disk, classified directly.  O(x); x <= kMaxBruteCount.
CountResult count_brute(std::uint64_t x, std::uint64_t q, std::int64_t a);

/// Column sums over the root lists; O(sqrt(x) + q).
CountResult count_progression(std::uint64_t x, std::uint64_t q, std::int64_t a);
CountResult count_progression(const SqrtTable& table, std::uint64_t x, std::int64_t a);

/// pi * eta_a(q) * x / q^2.
double main_term(std::uint64_t x, std::uint64_t q, std::int64_t a);
double main_term_from_eta(std::uint64_t x, std::uint64_t q, std::uint64_t eta_value);

double remainder_value(std::uint64_t x, std::uint64_t q, std::int64_t a);

}  // namespace apcircle::counting
