// validation.hpp - brute-force references for the closed forms.
//
// Exact enumeration over every symbol matrix of a tiny frame, a naive
// eight-index evaluation of E{A^2}, and a sampled matched-filter check.
// All of them are slow by design and meant for small N, M.

#pragma once

#include "otfsaf/ambiguity.hpp"
#include "otfsaf/common.hpp"
#include "otfsaf/constellation.hpp"
#include "otfsaf/random.hpp"
#include "otfsaf/statistics.hpp"
#include "otfsaf/waveform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace otfsaf {

/// Every equiprobable TF frame of an N x M grid (order^(NM) of them).
inline std::vector<TfSymbolGrid> all_frames(const GridConfig& cfg, const Constellation& c,
                                            WaveformKind kind = WaveformKind::Otfs) {
    const std::size_t cells = cfg.n * cfg.m;
    const std::size_t q = c.points.size();
    double count = std::pow(static_cast<double>(q), static_cast<double>(cells));
    if (count > 1 << 20) throw std::invalid_argument("enumeration too large");

    std::vector<TfSymbolGrid> frames;
    frames.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> digit(cells, 0);
    for (;;) {
        DdSymbolGrid x;
        x.values = ComplexMatrix(cfg.n, cfg.m);
        for (std::size_t i = 0; i < cells; ++i) x.values.data()[i] = c.points[digit[i]];
        frames.push_back(map_symbols(x, cfg, kind));
        std::size_t i = 0;
        while (i < cells && ++digit[i] == q) digit[i++] = 0;
        if (i == cells) break;
    }
    return frames;
}

struct ExactAfMoments {
    AfAxes axes;
    ComplexMatrix mean_complex;  // E{A^}
    RealMatrix second_moment;    // E{|A^|^2}
};

inline ExactAfMoments enumerate_af_moments(const GridConfig& cfg, const std::vector<TfSymbolGrid>& frames,
                                           const AfAxes& axes) {
    ExactAfMoments out;
    out.axes = axes;
    out.mean_complex = ComplexMatrix(axes.tau_values.size(), axes.fd_values.size());
    out.second_moment = RealMatrix(axes.tau_values.size(), axes.fd_values.size());
    const double inv = 1.0 / static_cast<double>(frames.size());
    for (std::size_t i = 0; i < axes.tau_values.size(); ++i) {
        for (std::size_t j = 0; j < axes.fd_values.size(); ++j) {
            const DelayDopplerPoint p{axes.tau_values[i], axes.fd_values[j]};
            Complex s{};
            double s2 = 0.0;
            for (const auto& f : frames) {
                const Complex a = complex_af(f, cfg, p);
                s += a;
                s2 += std::norm(a);
            }
            out.mean_complex(i, j) = s * inv;
            out.second_moment(i, j) = s2 * inv;
        }
    }
    return out;
}

/// Exact E{X[n1,m1] X*[n2,m2] X*[nb1,mb1] X[nb2,mb2]} over the frames.
inline Complex enumerate_fourth_moment(const std::vector<TfSymbolGrid>& frames, const std::array<long, 8>& idx) {
    Complex s{};
    for (const auto& f : frames) {
        s += f(idx[0], idx[1]) * std::conj(f(idx[2], idx[3])) * std::conj(f(idx[4], idx[5])) * f(idx[6], idx[7]);
    }
    return s / static_cast<double>(frames.size());
}

/// Term K(n1,m1,n2,m2) of A^ = 1/(NM) sum X[n1,m1] X*[n2,m2] K.
inline Complex af_kernel(const GridConfig& cfg, DelayDopplerPoint p, long n1, long m1, long n2, long m2) {
    const long d = n1 - n2;
    const long e = m1 - m2;
    const double ag = a_g(d * cfg.t - p.tau, e * cfg.delta_f + p.fd, cfg.t);
    if (ag == 0.0) return {};
    const double angle = kPi * static_cast<double>(m1 + m2) * cfg.delta_f * p.tau +
                         kPi * (static_cast<double>(n1 + n2 + 1) * cfg.t + p.tau) * p.fd;
    return af_term_sign(d, e) * ag * std::polar(1.0, angle);
}

/// E{|A^|^2} straight from the fourth moments: (NM)^4 terms.
inline double naive_second_moment(const GridConfig& cfg, const ConstellationMoments& cm, DelayDopplerPoint p) {
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);
    const long cells = nn * mm;
    std::vector<Complex> k(static_cast<std::size_t>(cells * cells));
    for (long a = 0; a < cells; ++a) {
        for (long b = 0; b < cells; ++b) k[a * cells + b] = af_kernel(cfg, p, a / mm, a % mm, b / mm, b % mm);
    }
    Complex acc{};
    for (long a = 0; a < cells; ++a) {
        for (long b = 0; b < cells; ++b) {
            const Complex kab = k[a * cells + b];
            if (kab == Complex{}) continue;
            for (long c = 0; c < cells; ++c) {
                for (long d = 0; d < cells; ++d) {
                    const Complex kcd = k[c * cells + d];
                    if (kcd == Complex{}) continue;
                    acc += kab * std::conj(kcd) *
                           fourth_moment_tf(cfg, cm, a / mm, a % mm, b / mm, b % mm, c / mm, c % mm, d / mm, d % mm);
                }
            }
        }
    }
    return acc.real() / (cfg.nm() * cfg.nm());
}

/// |a - b| / (rel max(|a|, |b|) + abs_floor); at most 1 means "close".
inline double tolerance_ratio(double a, double b, double rel, double abs_floor) {
    const double err = std::abs(a - b);
    return err == 0.0 ? 0.0 : err / (rel * std::max(std::abs(a), std::abs(b)) + abs_floor);
}

inline bool close_rel(double a, double b, double rel, double abs_floor) {
    return tolerance_ratio(a, b, rel, abs_floor) <= 1.0;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;  // worst error relative to the allowed error (enumeration) or worst relative error
    std::string detail;
};

/// Exact enumeration of all order^(NM) frames against the closed forms, on an
/// 11 x 11 grid over |tau| <= 2T, |fd| <= 2 df.
inline std::vector<CheckResult> enumeration_checks(const GridConfig& cfg, int order, double rel = 1e-9) {
    const Constellation c = make_qam(order);
    const ConstellationMoments cm = moments(c);
    const auto frames = all_frames(cfg, c);
    AfAxes axes;
    for (int i = -5; i <= 5; ++i) {
        axes.tau_values.push_back(0.4 * i * cfg.t);
        axes.fd_values.push_back(0.4 * i * cfg.delta_f);
    }
    const ExactAfMoments ex = enumerate_af_moments(cfg, frames, axes);
    const double floor = 1e-12 * cfg.nm();
    const double floor_sq = 1e-12 * cfg.nm() * cfg.nm();

    CheckResult mean{"exact E{A^} vs closed form", true, 0.0, {}};
    CheckResult second{"exact E{A^2} vs closed form", true, 0.0, {}};
    for (std::size_t i = 0; i < axes.tau_values.size(); ++i) {
        for (std::size_t j = 0; j < axes.fd_values.size(); ++j) {
            const DelayDopplerPoint p{axes.tau_values[i], axes.fd_values[j]};
            const double m_ref = std::abs(ex.mean_complex(i, j));
            const double m_cf = mean_abs_complex_af(cfg, p);
            double raw = 0.0;
            second_moment_af(cfg, cm, p, &raw);
            const double s_ref = ex.second_moment(i, j);
            mean.worst = std::max(mean.worst, tolerance_ratio(m_ref, m_cf, rel, floor));
            second.worst = std::max(second.worst, tolerance_ratio(s_ref, raw, rel, floor_sq));
        }
    }

    CheckResult fourth{"exact E{XX*X*X} vs closed form", true, 0.0, {}};
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);
    const long cells = nn * mm;
    const double scale = cfg.nm() * cfg.nm() * cm.e_abs4;
    for (long a = 0; a < cells; ++a) {
        for (long b = 0; b < cells; ++b) {
            for (long c2 = 0; c2 < cells; ++c2) {
                for (long d = 0; d < cells; ++d) {
                    const std::array<long, 8> idx{a / mm, a % mm, b / mm, b % mm, c2 / mm, c2 % mm, d / mm, d % mm};
                    const Complex ref = enumerate_fourth_moment(frames, idx);
                    const Complex cf = fourth_moment_tf(cfg, cm, idx[0], idx[1], idx[2], idx[3], idx[4], idx[5],
                                                        idx[6], idx[7]);
                    const double err = std::abs(ref - cf);
                    const double allowed = rel * std::max(std::abs(ref), std::abs(cf)) + 1e-12 * scale;
                    fourth.worst = std::max(fourth.worst, err / allowed);
                }
            }
        }
    }
    for (CheckResult* r : {&mean, &second, &fourth}) {
        r->passed = r->worst <= 1.0;
        r->detail = "worst error / allowed " + std::to_string(r->worst);
    }
    return {mean, second, fourth};
}

/// |complex_af| against matched_filter_af on random points of random frames.
/// Points are uniform over |tau| <= NT, |fd| <= fd_max df; only points with
/// |A^| > min_magnitude are compared.
inline CheckResult matched_filter_check(const GridConfig& cfg, int order, std::size_t realizations,
                                        std::size_t points, std::uint64_t seed, int oversample = 64,
                                        double rel = 1e-3, double min_magnitude = 0.01, double fd_max = 10.0,
                                        WaveformKind kind = WaveformKind::Otfs) {
    const Constellation c = make_qam(order);
    CheckResult out{"matched filter vs closed-form AF", true, 0.0, {}};
    std::size_t compared = 0;
    for (std::size_t r = 0; r < realizations; ++r) {
        const DdSymbolGrid x = draw_iid(c, cfg.n, cfg.m, stream_seed(seed, r));
        const TfSymbolGrid big_x = map_symbols(x, cfg, kind);
        const SampledSignal s = synthesize(big_x, cfg, oversample);
        for (std::size_t k = 0; k < points; ++k) {
            const double u = uniform_unit(counter_hash(seed ^ 0xa5a5a5a5ULL, r, 2 * k));
            const double v = uniform_unit(counter_hash(seed ^ 0xa5a5a5a5ULL, r, 2 * k + 1));
            const DelayDopplerPoint p{(2.0 * u - 1.0) * static_cast<double>(cfg.n) * cfg.t,
                                      (2.0 * v - 1.0) * fd_max * cfg.delta_f};
            const double ref = std::abs(complex_af(big_x, cfg, p));
            if (!(ref > min_magnitude)) continue;
            const double mf = matched_filter_af(s, p);
            const double err = std::abs(mf - ref) / ref;
            ++compared;
            out.worst = std::max(out.worst, err);
            if (!(err <= rel)) out.passed = false;
        }
    }
    out.detail = std::to_string(compared) + " points, worst relative error " + std::to_string(out.worst);
    if (compared == 0) out.passed = false;
    return out;
}

}  // namespace otfsaf
