// constellation.hpp - normalized QAM point sets, their moments and seeded
// i.i.d. symbol grids.
//
// Supported orders: 4, 16, 64 (square), 8 (rectangular 4x2) and 32 (cross:
// a 6x6 grid with the four corner points removed). Every constellation is
// scaled to unit average energy.

#pragma once

#include "otfsaf/common.hpp"
#include "otfsaf/random.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace otfsaf {

struct Constellation {
    int order = 0;
    std::vector<Complex> points;
};

/// Averages over the point set. Only e_abs4 and e_x2_abs_sq change the
/// second moment of the AF; e_abs2 is 1 for every normalized set.
struct ConstellationMoments {
    double e_abs2 = 0.0;       // E{|x|^2}
    double e_abs4 = 0.0;       // E{|x|^4}
    double e_x2_abs_sq = 0.0;  // |E{x^2}|^2
};

/// N x M matrix of delay-Doppler symbols x[k, l] (k: Doppler, l: delay).
struct DdSymbolGrid {
    ComplexMatrix values;

    DdSymbolGrid() = default;
    DdSymbolGrid(std::size_t n, std::size_t m) : values(n, m) {}
    explicit DdSymbolGrid(ComplexMatrix v) : values(std::move(v)) {}

    std::size_t n() const noexcept { return values.rows(); }
    std::size_t m() const noexcept { return values.cols(); }
    Complex& operator()(std::size_t k, std::size_t l) { return values(k, l); }
    const Complex& operator()(std::size_t k, std::size_t l) const { return values(k, l); }
};

inline bool is_supported_qam_order(int order) {
    return order == 4 || order == 8 || order == 16 || order == 32 || order == 64;
}

inline Constellation make_qam(int order) {
    if (!is_supported_qam_order(order)) {
        throw InvalidOrder("unsupported QAM order " + std::to_string(order) +
                           " (expected 4, 8, 16, 32 or 64)");
    }

    auto odd_levels = [](int count) {
        std::vector<double> levels;
        for (int i = 0; i < count; ++i) {
            levels.push_back(static_cast<double>(2 * i - count + 1));
        }
        return levels;
    };

    std::vector<Complex> raw;
    if (order == 8) {
        for (double i : odd_levels(4)) {
            for (double q : odd_levels(2)) raw.emplace_back(i, q);
        }
    } else if (order == 32) {
        for (double i : odd_levels(6)) {
            for (double q : odd_levels(6)) {
                if (std::abs(i) == 5.0 && std::abs(q) == 5.0) continue;
                raw.emplace_back(i, q);
            }
        }
    } else {
        const int side = static_cast<int>(std::lround(std::sqrt(order)));
        for (double i : odd_levels(side)) {
            for (double q : odd_levels(side)) raw.emplace_back(i, q);
        }
    }

    double energy = 0.0;
    for (const auto& p : raw) energy += std::norm(p);
    energy /= static_cast<double>(raw.size());
    const double scale = 1.0 / std::sqrt(energy);

    Constellation c;
    c.order = order;
    c.points.reserve(raw.size());
    for (const auto& p : raw) c.points.push_back(p * scale);
    return c;
}

inline ConstellationMoments moments(const Constellation& c) {
    ConstellationMoments cm;
    Complex e_x2{0.0, 0.0};
    for (const auto& p : c.points) {
        const double a2 = std::norm(p);
        cm.e_abs2 += a2;
        cm.e_abs4 += a2 * a2;
        e_x2 += p * p;
    }
    const double count = static_cast<double>(c.points.size());
    cm.e_abs2 /= count;
    cm.e_abs4 /= count;
    e_x2 /= count;
    cm.e_x2_abs_sq = std::norm(e_x2);
    return cm;
}

/// Index of the point drawn for entry (k, l). Depends only on (seed, k, l).
inline std::size_t draw_index(std::size_t order, std::uint64_t seed, std::size_t k, std::size_t l) {
    return uniform_index(counter_hash(seed, k, l), order);
}

inline DdSymbolGrid draw_iid(const Constellation& c, std::size_t n, std::size_t m, std::uint64_t seed) {
    if (n == 0 || m == 0) {
        throw DimensionMismatch("symbol grid dimensions must be positive");
    }
    DdSymbolGrid grid(n, m);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < m; ++l) {
            grid(k, l) = c.points[draw_index(c.points.size(), seed, k, l)];
        }
    }
    return grid;
}

}  // namespace otfsaf
