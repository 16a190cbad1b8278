// waveform.hpp - OTFS/OFDM symbol mapping and time-domain synthesis.
//
// OTFS spreads each delay-Doppler symbol x[k, l] over the whole
// time-frequency grid:
//
//   X[n, m] = sum_{k, l} x[k, l] exp(j 2 pi (n k / N - m l / M))
//
// (unnormalized, so sum |X|^2 = N M sum |x|^2). OFDM places x directly on
// the time-frequency grid. The transmitted signal is
//
//   s(t) = 1/sqrt(NM) sum_{n, m} X[n, m] g(t - nT) exp(j 2 pi m df (t - nT))
//
// with g the rectangular pulse of amplitude 1/sqrt(T) on [0, T).

#pragma once

#include "otfsaf/common.hpp"
#include "otfsaf/constellation.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace otfsaf {

struct GridConfig {
    std::size_t n = 1;     // time slots / Doppler bins
    std::size_t m = 1;     // subcarriers / delay bins
    double t = 1.0;        // symbol duration [s]
    double delta_f = 1.0;  // subcarrier spacing [Hz]

    static GridConfig make(std::size_t n, std::size_t m, double t = 1.0) {
        GridConfig cfg{n, m, t, 1.0 / t};
        cfg.validate();
        return cfg;
    }

    double nm() const noexcept { return static_cast<double>(n * m); }

    void validate() const {
        if (n == 0 || m == 0) throw std::invalid_argument("grid dimensions N and M must be >= 1");
        if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("symbol duration T must be > 0");
        if (std::abs(delta_f * t - 1.0) > 1e-12) {
            throw std::invalid_argument("subcarrier spacing must satisfy delta_f * T = 1");
        }
    }
};

/// N x M time-frequency symbols X[n, m].
struct TfSymbolGrid {
    ComplexMatrix values;

    TfSymbolGrid() = default;
    TfSymbolGrid(std::size_t n, std::size_t m) : values(n, m) {}
    explicit TfSymbolGrid(ComplexMatrix v) : values(std::move(v)) {}

    std::size_t n() const noexcept { return values.rows(); }
    std::size_t m() const noexcept { return values.cols(); }
    Complex& operator()(std::size_t n, std::size_t m) { return values(n, m); }
    const Complex& operator()(std::size_t n, std::size_t m) const { return values(n, m); }
};

/// Uniformly sampled signal. Sample i is the value at the centre of the cell
/// [start_time + i / sample_rate, start_time + (i + 1) / sample_rate).
struct SampledSignal {
    double sample_rate = 0.0;
    double start_time = 0.0;
    std::vector<Complex> samples;
    // Samples per smooth piece (one pulse); 0 treats the whole record as smooth.
    std::size_t segment_samples = 0;

    double sample_period() const noexcept { return 1.0 / sample_rate; }
    double end_time() const noexcept {
        return start_time + static_cast<double>(samples.size()) / sample_rate;
    }
};

enum class WaveformKind { Otfs, Ofdm };

inline std::string to_string(WaveformKind kind) {
    return kind == WaveformKind::Otfs ? "otfs" : "ofdm";
}

namespace detail {

inline void check_dims(std::size_t rows, std::size_t cols, const GridConfig& cfg, const char* what) {
    if (rows != cfg.n || cols != cfg.m) {
        throw DimensionMismatch(std::string(what) + " is " + std::to_string(rows) + "x" +
                                std::to_string(cols) + ", grid config expects " +
                                std::to_string(cfg.n) + "x" + std::to_string(cfg.m));
    }
}

// exp(j 2 pi sign * (i * j mod len) / len) for all i, j < len.
inline ComplexMatrix dft_twiddles(std::size_t len, double sign) {
    ComplexMatrix w(len, len);
    for (std::size_t i = 0; i < len; ++i) {
        for (std::size_t j = 0; j < len; ++j) {
            const double frac = static_cast<double>((i * j) % len) / static_cast<double>(len);
            w(i, j) = std::polar(1.0, sign * 2.0 * kPi * frac);
        }
    }
    return w;
}

// out = left * in * right, all dense.
inline ComplexMatrix triple_product(const ComplexMatrix& left, const ComplexMatrix& in,
                                    const ComplexMatrix& right) {
    ComplexMatrix tmp(left.rows(), in.cols());
    for (std::size_t i = 0; i < left.rows(); ++i) {
        for (std::size_t k = 0; k < in.rows(); ++k) {
            const Complex a = left(i, k);
            for (std::size_t j = 0; j < in.cols(); ++j) tmp(i, j) += a * in(k, j);
        }
    }
    ComplexMatrix out(tmp.rows(), right.cols());
    for (std::size_t i = 0; i < tmp.rows(); ++i) {
        for (std::size_t k = 0; k < tmp.cols(); ++k) {
            const Complex a = tmp(i, k);
            for (std::size_t j = 0; j < right.cols(); ++j) out(i, j) += a * right(k, j);
        }
    }
    return out;
}

}  // namespace detail

/// Delay-Doppler to time-frequency mapping (ISFFT, no normalization).
inline TfSymbolGrid dd_to_tf(const DdSymbolGrid& x, const GridConfig& cfg) {
    detail::check_dims(x.n(), x.m(), cfg, "DD symbol grid");
    // X = F_N x G_M with F_N(n, k) = e^{+j2pi nk/N}, G_M(l, m) = e^{-j2pi ml/M}
    return TfSymbolGrid(detail::triple_product(detail::dft_twiddles(cfg.n, +1.0), x.values,
                                               detail::dft_twiddles(cfg.m, -1.0)));
}

/// Inverse of dd_to_tf (carries the 1/(NM) factor).
inline DdSymbolGrid tf_to_dd(const TfSymbolGrid& big_x, const GridConfig& cfg) {
    detail::check_dims(big_x.n(), big_x.m(), cfg, "TF symbol grid");
    DdSymbolGrid x(detail::triple_product(detail::dft_twiddles(cfg.n, -1.0), big_x.values,
                                          detail::dft_twiddles(cfg.m, +1.0)));
    const double scale = 1.0 / cfg.nm();
    for (auto& v : x.values) v *= scale;
    return x;
}

/// OFDM: X[n, m] = x[n, m].
inline TfSymbolGrid ofdm_map(const DdSymbolGrid& x) { return TfSymbolGrid(x.values); }

inline TfSymbolGrid map_symbols(const DdSymbolGrid& x, const GridConfig& cfg, WaveformKind kind) {
    if (kind == WaveformKind::Ofdm) {
        detail::check_dims(x.n(), x.m(), cfg, "DD symbol grid");
        return ofdm_map(x);
    }
    return dd_to_tf(x, cfg);
}

/// Samples s(t) on [0, NT) at rate oversample * M * df. Each slot [nT, (n+1)T)
/// holds exactly oversample * M cells, so slot edges coincide with cell edges.
inline SampledSignal synthesize(const TfSymbolGrid& big_x, const GridConfig& cfg, int oversample) {
    detail::check_dims(big_x.n(), big_x.m(), cfg, "TF symbol grid");
    if (oversample < 2) {
        throw InvalidOversample("oversample must be >= 2, got " + std::to_string(oversample));
    }
    const std::size_t per_slot = static_cast<std::size_t>(oversample) * cfg.m;

    SampledSignal s;
    s.sample_rate = static_cast<double>(per_slot) / cfg.t;
    s.start_time = 0.0;
    s.samples.assign(cfg.n * per_slot, Complex{});
    s.segment_samples = per_slot;

    const double amp = 1.0 / (std::sqrt(cfg.t) * std::sqrt(cfg.nm()));
    for (std::size_t slot = 0; slot < cfg.n; ++slot) {
        for (std::size_t i = 0; i < per_slot; ++i) {
            // local time t - nT at the cell centre
            const double local = (static_cast<double>(i) + 0.5) / s.sample_rate;
            Complex acc{};
            for (std::size_t sc = 0; sc < cfg.m; ++sc) {
                acc += big_x(slot, sc) *
                       std::polar(1.0, 2.0 * kPi * static_cast<double>(sc) * cfg.delta_f * local);
            }
            s.samples[slot * per_slot + i] = amp * acc;
        }
    }
    return s;
}

/// Energy of the piecewise-constant reconstruction, sum |s_i|^2 / fs.
inline double signal_energy(const SampledSignal& s) {
    double e = 0.0;
    for (const auto& v : s.samples) e += std::norm(v);
    return e / s.sample_rate;
}

}  // namespace otfsaf
