// ambiguity.hpp - ambiguity function of a modulated OTFS/OFDM frame.
//
// For the signal of waveform.hpp the matched-filter response
//
//   A^(tau, fd) = integral s(t) s*(t - tau) exp(j 2 pi fd t) dt
//
// expands into a quadruple sum over (n1, n2, m1, m2):
//
//   A^ = 1/(NM) sum X[n1,m1] X*[n2,m2] e^{j pi (m1+m2) df tau}
//                e^{j pi [(n1+n2+1)T + tau] fd} (-1)^{(m1-m2)(n1+n2+1)}
//                A_g((n1-n2)T - tau, (m1-m2) df + fd)
//
// A_g(t', a) = (T - |t'|)/T sinc(pi a (T - |t'|)) on |t'| < T, else 0.
//
// The (-1)^{(m1-m2)(n1+n2+1)} factor is the subcarrier part of the
// overlap-centre phase, exp(j pi (m1-m2) df (n1+n2+1) T), evaluated with
// df T = 1. Without it |A^| no longer equals the matched-filter output.
//
// Only n1 - n2 = d with |dT - tau| < T contribute (at most two values of d),
// so one point costs O(N M^2).

#pragma once

#include "otfsaf/common.hpp"
#include "otfsaf/parallel.hpp"
#include "otfsaf/special.hpp"
#include "otfsaf/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace otfsaf {

struct DelayDopplerPoint {
    double tau = 0.0;  // [s]
    double fd = 0.0;   // [Hz]
};

struct AfAxes {
    std::vector<double> tau_values;
    std::vector<double> fd_values;

    void validate() const {
        auto check = [](const std::vector<double>& v, const char* name) {
            if (v.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
            for (std::size_t i = 1; i < v.size(); ++i) {
                if (!(v[i] > v[i - 1])) {
                    throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
                }
            }
        };
        check(tau_values, "tau");
        check(fd_values, "fd");
    }
};

/// Values i * unit / samples_per_unit for i = -K..K, K = round(half_extent * samples_per_unit).
/// Exactly symmetric about 0.
inline std::vector<double> symmetric_axis(double unit, int samples_per_unit, double half_extent_units) {
    if (samples_per_unit < 1) throw std::invalid_argument("samples per unit must be >= 1");
    if (!(half_extent_units >= 0.0)) throw std::invalid_argument("axis extent must be >= 0");
    const long k = std::lround(half_extent_units * samples_per_unit);
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(2 * k + 1));
    for (long i = -k; i <= k; ++i) {
        v.push_back(static_cast<double>(i) * unit / static_cast<double>(samples_per_unit));
    }
    return v;
}

/// Default analysis axes: |tau| <= tau_extent T (default N T) and
/// |fd| <= fd_max df, with the given sample densities per T and per df.
inline AfAxes default_axes(const GridConfig& cfg, int tau_samples_per_t = 16, int fd_samples_per_df = 16,
                           double fd_max_in_df = 10.0, std::optional<double> tau_extent_in_t = std::nullopt) {
    AfAxes axes;
    axes.tau_values = symmetric_axis(cfg.t, tau_samples_per_t,
                                     tau_extent_in_t.value_or(static_cast<double>(cfg.n)));
    axes.fd_values = symmetric_axis(cfg.delta_f, fd_samples_per_df, fd_max_in_df);
    return axes;
}

/// Index of the axis sample within tol of value, if any.
inline std::optional<std::size_t> find_axis_index(const std::vector<double>& axis, double value, double tol) {
    auto it = std::lower_bound(axis.begin(), axis.end(), value - tol);
    if (it != axis.end() && std::abs(*it - value) <= tol) {
        return static_cast<std::size_t>(it - axis.begin());
    }
    return std::nullopt;
}

/// Complex AF sampled on axes; values(tau_index, fd_index).
struct AfGrid {
    AfAxes axes;
    ComplexMatrix values;

    RealMatrix magnitude() const {
        RealMatrix out(values.rows(), values.cols());
        for (std::size_t i = 0; i < values.size(); ++i) out.data()[i] = std::abs(values.data()[i]);
        return out;
    }
};

inline double a_g(double t_prime, double alpha, double t_symbol) {
    const double overlap = t_symbol - std::abs(t_prime);
    if (!(overlap > 0.0)) return 0.0;
    return overlap / t_symbol * sinc(kPi * alpha * overlap);
}

/// Sign (-1)^{e (d + 1)} for d = n1 - n2, e = m1 - m2.
inline double af_term_sign(long d, long e) { return ((e * (d + 1)) % 2 == 0) ? 1.0 : -1.0; }

/// Direct evaluation of the quadruple sum at one point.
inline Complex complex_af(const TfSymbolGrid& big_x, const GridConfig& cfg, DelayDopplerPoint p) {
    detail::check_dims(big_x.n(), big_x.m(), cfg, "TF symbol grid");
    const long n_count = static_cast<long>(cfg.n);
    const long m_count = static_cast<long>(cfg.m);
    const double tt = cfg.t;
    const double df = cfg.delta_f;

    std::vector<Complex> sub(cfg.m), slot(cfg.n);
    for (long m = 0; m < m_count; ++m) sub[m] = std::polar(1.0, kPi * m * df * p.tau);
    for (long n = 0; n < n_count; ++n) slot[n] = std::polar(1.0, kPi * n * tt * p.fd);

    std::vector<double> ag(static_cast<std::size_t>(2 * m_count - 1));
    Complex acc{};
    for (long d = -(n_count - 1); d <= n_count - 1; ++d) {
        const double t_prime = d * tt - p.tau;
        if (!(std::abs(t_prime) < tt)) continue;
        for (long e = -(m_count - 1); e <= m_count - 1; ++e) {
            ag[e + m_count - 1] = a_g(t_prime, e * df + p.fd, tt) * af_term_sign(d, e);
        }
        for (long n2 = std::max(0L, -d); n2 < std::min(n_count, n_count - d); ++n2) {
            const long n1 = n2 + d;
            const Complex slot_phase = slot[n1] * slot[n2];
            for (long m1 = 0; m1 < m_count; ++m1) {
                const Complex left = big_x(n1, m1) * sub[m1];
                for (long m2 = 0; m2 < m_count; ++m2) {
                    acc += left * std::conj(big_x(n2, m2)) * sub[m2] * slot_phase *
                           ag[m1 - m2 + m_count - 1];
                }
            }
        }
    }
    const Complex origin = std::polar(1.0, kPi * (tt + p.tau) * p.fd);
    return acc * origin / cfg.nm();
}

/// Batch evaluator for one (config, axes) pair. All data-independent factors
/// (A_g values, Doppler twiddles, phases) are tabulated once, then every
/// symbol grid costs O((2M-1) N) per point.
class AfEvaluator {
public:
    AfEvaluator(const GridConfig& cfg, AfAxes axes) : cfg_(cfg), axes_(std::move(axes)) {
        cfg_.validate();
        axes_.validate();
        build();
    }

    const GridConfig& config() const noexcept { return cfg_; }
    const AfAxes& axes() const noexcept { return axes_; }

    AfGrid evaluate(const TfSymbolGrid& big_x, unsigned threads = default_thread_count()) const {
        AfGrid grid;
        grid.axes = axes_;
        grid.values = ComplexMatrix(axes_.tau_values.size(), axes_.fd_values.size());
        evaluate_into(big_x, grid.values, threads);
        return grid;
    }

    /// Writes into a preallocated tau x fd matrix.
    void evaluate_into(const TfSymbolGrid& big_x, ComplexMatrix& out,
                       unsigned threads = default_thread_count()) const {
        detail::check_dims(big_x.n(), big_x.m(), cfg_, "TF symbol grid");
        if (out.rows() != axes_.tau_values.size() || out.cols() != axes_.fd_values.size()) {
            out = ComplexMatrix(axes_.tau_values.size(), axes_.fd_values.size());
        }
        parallel_for(
            rows_.size(),
            [&](std::size_t i) {
                evaluate_row(big_x, i, std::span<Complex>(&out(i, 0), out.cols()));
            },
            threads);
    }

    /// Evaluates the tau row i into out (size = number of fd samples). The
    /// symbol grid must already match the configuration.
    void evaluate_row(const TfSymbolGrid& big_x, std::size_t i, std::span<Complex> out) const {
        const Row& row = rows_[i];
        const std::size_t n_fd = axes_.fd_values.size();
        const std::size_t slots = row.delays.size();
        if (slots == 0) {
            std::fill(out.begin(), out.end(), Complex{});
            return;
        }
        const long n_count = static_cast<long>(cfg_.n);
        const long m_count = static_cast<long>(cfg_.m);
        const long n_lags = lags();

        // lagged[s][e][n2] = sign e^{j pi e df tau} sum_m2 X[n2+d, m2+e] X*[n2, m2] e^{j 2 pi m2 df tau}
        std::vector<Complex> lagged(slots * n_lags * cfg_.n, Complex{});
        for (std::size_t s = 0; s < slots; ++s) {
            const long d = row.delays[s];
            for (long e = -(m_count - 1); e <= m_count - 1; ++e) {
                const long ei = e + m_count - 1;
                const Complex lp = row.lag_phase[s * n_lags + ei];
                for (long n2 = std::max(0L, -d); n2 < std::min(n_count, n_count - d); ++n2) {
                    Complex acc{};
                    for (long m2 = std::max(0L, -e); m2 < std::min(m_count, m_count - e); ++m2) {
                        acc += big_x(n2 + d, m2 + e) * std::conj(big_x(n2, m2)) * row.sub[m2];
                    }
                    lagged[(s * n_lags + ei) * cfg_.n + n2] = acc * lp;
                }
            }
        }

        std::vector<Complex> folded(cfg_.n);
        for (std::size_t f = 0; f < n_fd; ++f) {
            Complex total{};
            for (std::size_t s = 0; s < slots; ++s) {
                std::fill(folded.begin(), folded.end(), Complex{});
                const double* k = &row.kernel[(f * slots + s) * n_lags];
                const Complex* q = &lagged[s * n_lags * cfg_.n];
                for (long e = 0; e < n_lags; ++e) {
                    const double w = k[e];
                    if (w == 0.0) continue;
                    for (long n2 = 0; n2 < n_count; ++n2) folded[n2] += w * q[e * n_count + n2];
                }
                Complex acc{};
                for (long n2 = 0; n2 < n_count; ++n2) acc += doppler_twiddle_(f, n2) * folded[n2];
                total += acc * row.phase[f * slots + s];
            }
            out[f] = total;
        }
    }

private:
    struct Row {
        std::vector<long> delays;       // contributing d = n1 - n2
        std::vector<double> kernel;     // [f][slot][e]: A_g(dT - tau, e df + fd)
        std::vector<Complex> phase;     // [f][slot]: e^{j pi (d+1) T fd} e^{j pi tau fd} / NM
        std::vector<Complex> sub;       // [m]: e^{j 2 pi m df tau}
        std::vector<Complex> lag_phase; // [slot][e]: sign(d, e) e^{j pi e df tau}
    };

    long lags() const noexcept { return 2 * static_cast<long>(cfg_.m) - 1; }

    void build() {
        const long n_count = static_cast<long>(cfg_.n);
        const long m_count = static_cast<long>(cfg_.m);
        const std::size_t n_fd = axes_.fd_values.size();
        const long n_lags = lags();

        doppler_twiddle_ = ComplexMatrix(n_fd, cfg_.n);
        for (std::size_t f = 0; f < n_fd; ++f) {
            for (long n = 0; n < n_count; ++n) {
                doppler_twiddle_(f, n) = std::polar(1.0, 2.0 * kPi * n * cfg_.t * axes_.fd_values[f]);
            }
        }

        rows_.resize(axes_.tau_values.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const double tau = axes_.tau_values[i];
            Row& row = rows_[i];
            for (long d = -(n_count - 1); d <= n_count - 1; ++d) {
                if (std::abs(d * cfg_.t - tau) < cfg_.t) row.delays.push_back(d);
            }
            const std::size_t slots = row.delays.size();
            if (slots == 0) continue;

            row.sub.resize(cfg_.m);
            for (long m = 0; m < m_count; ++m) row.sub[m] = std::polar(1.0, 2.0 * kPi * m * cfg_.delta_f * tau);

            row.lag_phase.resize(slots * n_lags);
            for (std::size_t s = 0; s < slots; ++s) {
                for (long e = -(m_count - 1); e <= m_count - 1; ++e) {
                    row.lag_phase[s * n_lags + e + m_count - 1] =
                        af_term_sign(row.delays[s], e) * std::polar(1.0, kPi * e * cfg_.delta_f * tau);
                }
            }

            row.kernel.resize(n_fd * slots * n_lags);
            row.phase.resize(n_fd * slots);
            for (std::size_t f = 0; f < n_fd; ++f) {
                const double fd = axes_.fd_values[f];
                for (std::size_t s = 0; s < slots; ++s) {
                    const long d = row.delays[s];
                    row.phase[f * slots + s] =
                        std::polar(1.0 / cfg_.nm(), kPi * ((d + 1) * cfg_.t + tau) * fd);
                    for (long e = -(m_count - 1); e <= m_count - 1; ++e) {
                        row.kernel[(f * slots + s) * n_lags + e + m_count - 1] =
                            a_g(d * cfg_.t - tau, e * cfg_.delta_f + fd, cfg_.t);
                    }
                }
            }
        }
    }

    GridConfig cfg_;
    AfAxes axes_;
    ComplexMatrix doppler_twiddle_;  // [f][n]: e^{j 2 pi n T fd}
    std::vector<Row> rows_;
};

inline AfGrid af_grid(const TfSymbolGrid& big_x, const GridConfig& cfg, const AfAxes& axes) {
    return AfEvaluator(cfg, axes).evaluate(big_x);
}

namespace detail {

// Local cubic (Lagrange) reconstruction of a sampled signal. Sample i sits at
// the centre of cell i; the four stencil points never leave the segment that
// contains the evaluation cell, so pulse edges are not smeared.
class PulseInterpolant {
public:
    explicit PulseInterpolant(const SampledSignal& s)
        : s_(s), h_(s.sample_period()),
          seg_(s.segment_samples == 0 ? s.samples.size() : s.segment_samples) {}

    // Value at time t, known to lie in cell `cell`.
    Complex operator()(double t, std::size_t cell) const {
        const std::size_t seg_lo = cell / seg_ * seg_;
        const std::size_t seg_hi = std::min(seg_lo + seg_, s_.samples.size());
        const std::size_t width = std::min<std::size_t>(4, seg_hi - seg_lo);
        const double u = (t - s_.start_time) / h_ - 0.5;  // fractional sample index
        long j0 = static_cast<long>(std::floor(u)) - static_cast<long>(width / 2) + 1;
        j0 = std::clamp(j0, static_cast<long>(seg_lo), static_cast<long>(seg_hi - width));
        Complex acc{};
        for (std::size_t a = 0; a < width; ++a) {
            double w = 1.0;
            for (std::size_t b = 0; b < width; ++b) {
                if (a != b) w *= (u - static_cast<double>(j0 + static_cast<long>(b))) / (static_cast<double>(a) - static_cast<double>(b));
            }
            acc += w * s_.samples[static_cast<std::size_t>(j0) + a];
        }
        return acc;
    }

private:
    const SampledSignal& s_;
    double h_;
    std::size_t seg_;
};

}  // namespace detail

/// Matched-filter magnitude |integral s(t) s*(t - tau) e^{j 2 pi fd t} dt|
/// computed from samples alone.
///
/// The signal is rebuilt by local cubic interpolation inside each pulse
/// (segment_samples), and the product with its delayed copy is integrated by
/// 4-point Gauss-Legendre on every overlap of a cell with a delayed cell.
/// Both factors are smooth on each overlap, so the error is O(h^4).
inline double matched_filter_af(const SampledSignal& s, DelayDopplerPoint p) {
    static constexpr double kNode[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
    static constexpr double kWeight[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                          0.3478548451374538};
    const std::size_t count = s.samples.size();
    if (count == 0) return 0.0;
    const double h = s.sample_period();
    const double a = s.start_time;
    const double shift = p.tau / h;
    const detail::PulseInterpolant interp(s);

    Complex acc{};
    for (std::size_t i = 0; i < count; ++i) {
        const double cell_lo = a + static_cast<double>(i) * h;
        const double cell_hi = cell_lo + h;
        const long j0 = static_cast<long>(std::floor(static_cast<double>(i) - shift));
        for (long j = j0; j <= j0 + 1; ++j) {
            if (j < 0 || j >= static_cast<long>(count)) continue;
            const double lo = std::max(cell_lo, a + p.tau + static_cast<double>(j) * h);
            const double hi = std::min(cell_hi, a + p.tau + static_cast<double>(j + 1) * h);
            if (!(hi > lo)) continue;
            const double mid = 0.5 * (lo + hi);
            const double half = 0.5 * (hi - lo);
            for (int q = 0; q < 4; ++q) {
                const double t = mid + half * kNode[q];
                acc += kWeight[q] * half * interp(t, i) * std::conj(interp(t - p.tau, static_cast<std::size_t>(j))) *
                       std::polar(1.0, 2.0 * kPi * p.fd * t);
            }
        }
    }
    return std::abs(acc);
}

}  // namespace otfsaf
