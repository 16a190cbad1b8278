// metrics.hpp - peak and integrated sidelobe ratios of a sampled AF.

#pragma once

#include "otfsaf/ambiguity.hpp"
#include "otfsaf/common.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace otfsaf {

/// Rectangle |tau| <= tau_half_width, |fd| <= fd_half_width around the origin.
struct MainlobeRegion {
    double tau_half_width = 1.0;
    double fd_half_width = 1.0;

    static MainlobeRegion for_config(const GridConfig& cfg) { return {cfg.t, cfg.delta_f}; }

    void validate() const {
        if (!(tau_half_width > 0.0) || !(fd_half_width > 0.0)) {
            throw std::invalid_argument("mainlobe half widths must be > 0");
        }
    }
};

struct PslrResult {
    double pslr_db = 0.0;
    DelayDopplerPoint location;
};

struct IslrResult {
    double islr_db = 0.0;
    double mainlobe_energy = 0.0;
    double total_energy = 0.0;
    double doppler_edge_energy = 0.0;  // energy in the outermost Doppler cell on each side
};

struct SidelobeReport {
    double pslr_db = 0.0;
    double islr_db = 0.0;
    DelayDopplerPoint peak_location;
    double mainlobe_energy = 0.0;
    double total_energy = 0.0;
};

namespace detail {

inline constexpr double kEdgeTol = 1e-12;

inline bool is_sidelobe_sample(double tau, double fd, const MainlobeRegion& r) {
    return std::abs(tau) >= r.tau_half_width * (1.0 - kEdgeTol) ||
           std::abs(fd) >= r.fd_half_width * (1.0 - kEdgeTol);
}

inline bool in_closed_region(double v, double half_width) {
    return std::abs(v) <= half_width * (1.0 + kEdgeTol);
}

inline double axis_tol(const std::vector<double>& axis) {
    return 1e-9 * std::max(std::abs(axis.front()), std::abs(axis.back())) + 1e-300;
}

// Trapezoid weights of a (possibly non-uniform) axis restricted to [lo, hi).
inline std::vector<double> trapezoid_weights(const std::vector<double>& axis, std::size_t lo, std::size_t hi) {
    std::vector<double> w(axis.size(), 0.0);
    for (std::size_t i = lo; i + 1 < hi; ++i) {
        const double h = 0.5 * (axis[i + 1] - axis[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    return w;
}

inline double weighted_energy(const ComplexMatrix& v, const std::vector<double>& wt, const std::vector<double>& wf) {
    double e = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        if (wt[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < v.cols(); ++j) row += wf[j] * std::norm(v(i, j));
        e += wt[i] * row;
    }
    return e;
}

}  // namespace detail

/// 20 log10(max sidelobe / |A^(0,0)|). Sidelobe samples have |tau| >= tau_half_width
/// or |fd| >= fd_half_width. Ties go to the smallest |tau|, then smallest |fd|.
/// Returns -infinity when every sidelobe sample is zero.
inline PslrResult pslr(const AfGrid& grid, const MainlobeRegion& region) {
    region.validate();
    const auto& taus = grid.axes.tau_values;
    const auto& fds = grid.axes.fd_values;
    const auto ti = find_axis_index(taus, 0.0, detail::axis_tol(taus));
    const auto fi = find_axis_index(fds, 0.0, detail::axis_tol(fds));
    if (!ti || !fi) throw std::invalid_argument("AF grid does not contain the origin (0, 0)");
    const double peak = std::abs(grid.values(*ti, *fi));
    if (peak == 0.0) throw ZeroPeak("AF is zero at the origin");

    bool found = false;
    double best = -1.0;
    DelayDopplerPoint loc;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        for (std::size_t j = 0; j < fds.size(); ++j) {
            if (!detail::is_sidelobe_sample(taus[i], fds[j], region)) continue;
            const double v = std::abs(grid.values(i, j));
            bool better = !found || v > best;
            if (found && v == best) {
                const double at = std::abs(taus[i]), bt = std::abs(loc.tau);
                better = at < bt || (at == bt && std::abs(fds[j]) < std::abs(loc.fd));
            }
            if (better) {
                found = true;
                best = v;
                loc = {taus[i], fds[j]};
            }
        }
    }
    if (!found) throw NoSidelobeSamples("AF grid lies entirely inside the mainlobe region");

    PslrResult out;
    out.location = loc;
    out.pslr_db = best == 0.0 ? -std::numeric_limits<double>::infinity() : 20.0 * std::log10(best / peak);
    return out;
}

/// 10 log10(total / main - 1) with both energies from 2-D trapezoid
/// quadrature of |A^|^2: total over the whole grid, main over the samples
/// inside the closed mainlobe rectangle. Returns -infinity when total <= main.
inline IslrResult islr_detail(const AfGrid& grid, const MainlobeRegion& region) {
    region.validate();
    const auto& taus = grid.axes.tau_values;
    const auto& fds = grid.axes.fd_values;
    const double tol = detail::kEdgeTol;
    if (taus.front() > -region.tau_half_width * (1.0 - tol) || taus.back() < region.tau_half_width * (1.0 - tol) ||
        fds.front() > -region.fd_half_width * (1.0 - tol) || fds.back() < region.fd_half_width * (1.0 - tol)) {
        throw std::invalid_argument("AF grid must span the mainlobe region");
    }

    auto range = [](const std::vector<double>& axis, double half) {
        std::size_t lo = 0;
        while (lo < axis.size() && !detail::in_closed_region(axis[lo], half)) ++lo;
        std::size_t hi = lo;
        while (hi < axis.size() && detail::in_closed_region(axis[hi], half)) ++hi;
        return std::pair{lo, hi};
    };
    const auto [tlo, thi] = range(taus, region.tau_half_width);
    const auto [flo, fhi] = range(fds, region.fd_half_width);

    IslrResult out;
    const auto wt_all = detail::trapezoid_weights(taus, 0, taus.size());
    const auto wf_all = detail::trapezoid_weights(fds, 0, fds.size());
    out.total_energy = detail::weighted_energy(grid.values, wt_all, wf_all);
    out.mainlobe_energy = detail::weighted_energy(grid.values, detail::trapezoid_weights(taus, tlo, thi),
                                                  detail::trapezoid_weights(fds, flo, fhi));
    if (fds.size() >= 2) {
        const std::size_t k = fds.size();
        auto edge = detail::trapezoid_weights(fds, 0, 2);
        const auto upper = detail::trapezoid_weights(fds, k - 2, k);
        for (std::size_t j = 0; j < k; ++j) edge[j] += upper[j];
        out.doppler_edge_energy = detail::weighted_energy(grid.values, wt_all, edge);
    }

    if (!(out.mainlobe_energy > 0.0)) throw ZeroPeak("mainlobe energy is zero");
    const double ratio = out.total_energy / out.mainlobe_energy - 1.0;
    out.islr_db = ratio > 0.0 ? 10.0 * std::log10(ratio) : -std::numeric_limits<double>::infinity();
    return out;
}

inline double islr(const AfGrid& grid, const MainlobeRegion& region) { return islr_detail(grid, region).islr_db; }

inline SidelobeReport sidelobe_report(const AfGrid& grid, const MainlobeRegion& region) {
    const PslrResult p = pslr(grid, region);
    const IslrResult i = islr_detail(grid, region);
    return {p.pslr_db, i.islr_db, p.location, i.mainlobe_energy, i.total_energy};
}

}  // namespace otfsaf
