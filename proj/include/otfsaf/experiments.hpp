// experiments.hpp - seeded Monte Carlo harness and the reproduction runs
// (relative-error table, sidelobe distributions, OTFS vs OFDM sweep).
//
// Realization r always draws its symbols from stream_seed(seed, r), and
// every accumulation runs in realization order, so results do not depend on
// thread count or scheduling.

#pragma once

#include "otfsaf/ambiguity.hpp"
#include "otfsaf/common.hpp"
#include "otfsaf/constellation.hpp"
#include "otfsaf/metrics.hpp"
#include "otfsaf/parallel.hpp"
#include "otfsaf/random.hpp"
#include "otfsaf/statistics.hpp"
#include "otfsaf/waveform.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace otfsaf {

/// Welford accumulator. variance() is the unbiased sample variance (0 for
/// fewer than two samples).
struct RunningStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    double variance() const { return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1); }
    double standard_error() const {
        return count == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(count));
    }
};

struct AxisDensity {
    int tau_samples_per_t = 16;
    int fd_samples_per_df = 16;
    double fd_max_in_df = 10.0;
};

struct ExperimentConfig {
    GridConfig cfg = GridConfig::make(4, 8);
    int qam_order = 4;
    std::size_t realizations = 1000;
    std::uint64_t seed = 1;
    AfAxes axes;
    MainlobeRegion region;
    WaveformKind waveform_kind = WaveformKind::Otfs;
    unsigned threads = default_thread_count();

    /// Config with default axes (|tau| <= NT) and the |tau| < T, |fd| < df mainlobe.
    static ExperimentConfig make(std::size_t n, std::size_t m, int qam_order, std::size_t realizations,
                                 std::uint64_t seed, AxisDensity density = {}, double t = 1.0) {
        ExperimentConfig ec;
        ec.cfg = GridConfig::make(n, m, t);
        ec.qam_order = qam_order;
        ec.realizations = realizations;
        ec.seed = seed;
        ec.axes = default_axes(ec.cfg, density.tau_samples_per_t, density.fd_samples_per_df, density.fd_max_in_df);
        ec.region = MainlobeRegion::for_config(ec.cfg);
        return ec;
    }

    void validate() const {
        cfg.validate();
        if (!is_supported_qam_order(qam_order)) {
            throw InvalidOrder("unsupported QAM order " + std::to_string(qam_order));
        }
        if (realizations < 1) throw std::invalid_argument("realizations must be >= 1");
        axes.validate();
        region.validate();
        if (axes.tau_values.front() > -region.tau_half_width || axes.tau_values.back() < region.tau_half_width ||
            axes.fd_values.front() > -region.fd_half_width || axes.fd_values.back() < region.fd_half_width) {
            throw std::invalid_argument("AF axes must cover the mainlobe region");
        }
    }
};

/// Symbols of realization r.
inline DdSymbolGrid realization_symbols(const Constellation& c, const GridConfig& cfg, std::uint64_t seed,
                                        std::size_t r) {
    return draw_iid(c, cfg.n, cfg.m, stream_seed(seed, r));
}

struct McMomentEstimate {
    AfAxes axes;
    RealMatrix mean_mag;        // sample mean of |A^|
    RealMatrix var_mag;         // unbiased sample variance of |A^|
    RealMatrix mean_sq_mag;     // sample mean of |A^|^2
    ComplexMatrix mean_complex; // sample mean of A^
    std::size_t realizations = 0;
};

inline McMomentEstimate run_mc_moments(const ExperimentConfig& ec) {
    ec.validate();
    const Constellation c = make_qam(ec.qam_order);
    const AfEvaluator evaluator(ec.cfg, ec.axes);

    std::vector<TfSymbolGrid> frames;
    frames.reserve(ec.realizations);
    for (std::size_t r = 0; r < ec.realizations; ++r) {
        frames.push_back(map_symbols(realization_symbols(c, ec.cfg, ec.seed, r), ec.cfg, ec.waveform_kind));
    }

    const std::size_t rows = ec.axes.tau_values.size();
    const std::size_t cols = ec.axes.fd_values.size();
    McMomentEstimate est;
    est.axes = ec.axes;
    est.realizations = ec.realizations;
    est.mean_mag = RealMatrix(rows, cols);
    est.var_mag = RealMatrix(rows, cols);
    est.mean_sq_mag = RealMatrix(rows, cols);
    est.mean_complex = ComplexMatrix(rows, cols);

    // One tau row per task; each task walks the realizations in order.
    parallel_for(
        rows,
        [&](std::size_t i) {
            std::vector<Complex> row(cols);
            std::vector<RunningStats> stats(cols);
            std::vector<Complex> sum(cols);
            std::vector<double> sum_sq(cols);
            for (const auto& frame : frames) {
                evaluator.evaluate_row(frame, i, row);
                for (std::size_t j = 0; j < cols; ++j) {
                    const double a = std::abs(row[j]);
                    stats[j].push(a);
                    sum[j] += row[j];
                    sum_sq[j] += a * a;
                }
            }
            const double inv = 1.0 / static_cast<double>(ec.realizations);
            for (std::size_t j = 0; j < cols; ++j) {
                est.mean_mag(i, j) = stats[j].mean;
                est.var_mag(i, j) = stats[j].variance();
                est.mean_sq_mag(i, j) = sum_sq[j] * inv;
                est.mean_complex(i, j) = sum[j] * inv;
            }
        },
        ec.threads);
    return est;
}

/// Mean of |estimate - reference| / |reference| over points with
/// |reference| > threshold (default 1e-3 max |reference|).
inline double avg_relative_error(const RealMatrix& reference, const RealMatrix& estimate,
                                 std::optional<double> threshold = std::nullopt) {
    if (!reference.same_shape(estimate)) throw DimensionMismatch("reference and estimate differ in shape");
    double thr = 0.0;
    if (threshold) {
        thr = *threshold;
    } else {
        double peak = 0.0;
        for (double v : reference) peak = std::max(peak, std::abs(v));
        thr = 1e-3 * peak;
    }
    double total = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double ref = reference.data()[i];
        if (!(std::abs(ref) > thr)) continue;
        total += std::abs(estimate.data()[i] - ref) / std::abs(ref);
        ++count;
    }
    if (count == 0) throw EmptyMask("no reference value exceeds the threshold");
    return total / static_cast<double>(count);
}

// ----------------------------------------------------------------------------
// Relative-error table
// ----------------------------------------------------------------------------

struct RelErrorRow {
    int qam_order = 0;
    double mean_approx_err = 0.0;  // Rice mean vs simulated E{A}
    double mean_bound_err = 0.0;   // sqrt(E{A^2}) vs simulated E{A}
    double var_approx_err = 0.0;   // Rice variance vs simulated Var{A}
    double var_bound_err = 0.0;    // 2 sigma^2 vs simulated Var{A}
};

struct Table1Options {
    std::size_t n = 4;
    std::size_t m = 8;
    double t = 1.0;
    AxisDensity density{};
    unsigned threads = default_thread_count();
};

struct Table1Run {
    RelErrorRow row;
    McMomentEstimate mc;
    MomentSurfaces surfaces;
};

inline Table1Run table1_run(int order, std::size_t realizations, std::uint64_t seed, const Table1Options& opt = {}) {
    ExperimentConfig ec = ExperimentConfig::make(opt.n, opt.m, order, realizations, seed, opt.density, opt.t);
    ec.threads = opt.threads;
    Table1Run run;
    run.mc = run_mc_moments(ec);
    run.surfaces = moment_surfaces(ec.cfg, moments(make_qam(order)), ec.axes, opt.threads);
    run.row.qam_order = order;
    run.row.mean_approx_err = avg_relative_error(run.mc.mean_mag, run.surfaces.rice_mean);
    run.row.mean_bound_err = avg_relative_error(run.mc.mean_mag, run.surfaces.mean_upper);
    run.row.var_approx_err = avg_relative_error(run.mc.var_mag, run.surfaces.rice_var);
    run.row.var_bound_err = avg_relative_error(run.mc.var_mag, run.surfaces.var_upper);
    return run;
}

inline std::vector<RelErrorRow> reproduce_table1(const std::vector<int>& orders, std::size_t realizations,
                                                 std::uint64_t seed, const Table1Options& opt = {}) {
    for (int o : orders) {
        if (!is_supported_qam_order(o)) throw InvalidOrder("unsupported QAM order " + std::to_string(o));
    }
    std::vector<RelErrorRow> rows;
    for (int o : orders) rows.push_back(table1_run(o, realizations, seed, opt).row);
    return rows;
}

// ----------------------------------------------------------------------------
// Sidelobe statistics
// ----------------------------------------------------------------------------

struct SidelobeSample {
    double pslr_db = 0.0;
    double islr_db = 0.0;
};

/// Per-realization PSLR / ISLR, in realization order.
inline std::vector<SidelobeSample> sidelobe_distribution(const ExperimentConfig& ec) {
    ec.validate();
    const Constellation c = make_qam(ec.qam_order);
    const AfEvaluator evaluator(ec.cfg, ec.axes);
    std::vector<SidelobeSample> out;
    out.reserve(ec.realizations);
    AfGrid grid;
    grid.axes = ec.axes;
    for (std::size_t r = 0; r < ec.realizations; ++r) {
        const TfSymbolGrid frame = map_symbols(realization_symbols(c, ec.cfg, ec.seed, r), ec.cfg, ec.waveform_kind);
        evaluator.evaluate_into(frame, grid.values, ec.threads);
        const SidelobeReport rep = sidelobe_report(grid, ec.region);
        out.push_back({rep.pslr_db, rep.islr_db});
    }
    return out;
}

struct CompareRow {
    WaveformKind waveform = WaveformKind::Otfs;
    std::size_t m = 0;
    double mean_pslr_db = 0.0;
    double mean_islr_db = 0.0;
};

struct CompareOptions {
    int qam_order = 4;
    double t = 1.0;
    AxisDensity density{};
    unsigned threads = default_thread_count();
    /// Called once per symbol draw with (M, realization index).
    std::function<void(std::size_t, std::size_t)> on_draw;
};

/// Mean PSLR / ISLR of OTFS and OFDM for each M. Both waveforms are fed the
/// same delay-Doppler symbols in every realization.
inline std::vector<CompareRow> compare_otfs_ofdm(std::size_t n, const std::vector<std::size_t>& m_values,
                                                 std::size_t realizations, std::uint64_t seed,
                                                 const CompareOptions& opt = {}) {
    if (m_values.empty()) throw std::invalid_argument("m_values must not be empty");
    std::vector<CompareRow> rows;
    for (std::size_t m : m_values) {
        ExperimentConfig ec = ExperimentConfig::make(n, m, opt.qam_order, realizations, seed, opt.density, opt.t);
        ec.validate();
        const Constellation c = make_qam(ec.qam_order);
        const AfEvaluator evaluator(ec.cfg, ec.axes);
        AfGrid grid;
        grid.axes = ec.axes;

        RunningStats otfs_pslr, otfs_islr, ofdm_pslr, ofdm_islr;
        for (std::size_t r = 0; r < realizations; ++r) {
            const DdSymbolGrid x = realization_symbols(c, ec.cfg, seed, r);
            if (opt.on_draw) opt.on_draw(m, r);

            evaluator.evaluate_into(dd_to_tf(x, ec.cfg), grid.values, opt.threads);
            SidelobeReport rep = sidelobe_report(grid, ec.region);
            otfs_pslr.push(rep.pslr_db);
            otfs_islr.push(rep.islr_db);

            evaluator.evaluate_into(ofdm_map(x), grid.values, opt.threads);
            rep = sidelobe_report(grid, ec.region);
            ofdm_pslr.push(rep.pslr_db);
            ofdm_islr.push(rep.islr_db);
        }
        rows.push_back({WaveformKind::Otfs, m, otfs_pslr.mean, otfs_islr.mean});
        rows.push_back({WaveformKind::Ofdm, m, ofdm_pslr.mean, ofdm_islr.mean});
    }
    return rows;
}

}  // namespace otfsaf
