// statistics.hpp - closed-form moments of the AF over i.i.d. QAM data.
//
// With A = |A^| and unit-energy i.i.d. symbols:
//
//   |E{A^}|   piecewise closed form in (tau, fd)
//   E{A^2}    = N^2 M^2 |A_g(-tau, fd)|^2 C1(T fd, N) C1(df tau, M)
//               + sum_{n1,n2,m1,m2} |A_g((n1-n2)T - tau, (m1-m2) df + fd)|^2
//               + (eight-index term driven by E|x|^4 and |E{x^2}|^2)
//
// and the magnitude is approximated by a Rice law with
//   nu = |E{A^}|,  sigma^2 = (E{A^2} - nu^2) / 2.

#pragma once

#include "otfsaf/ambiguity.hpp"
#include "otfsaf/common.hpp"
#include "otfsaf/constellation.hpp"
#include "otfsaf/parallel.hpp"
#include "otfsaf/special.hpp"
#include "otfsaf/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace otfsaf {

// ----------------------------------------------------------------------------
// Kernels
// ----------------------------------------------------------------------------

/// C1(x, N) = sin^2(N pi x) / (N^2 sin^2(pi x)), and 1 at integer x.
/// N^2 C1(x, N) = |sum_{k<N} e^{j 2 pi k x}|^2.
inline double c1(double x, long n) {
    if (n < 1) throw std::invalid_argument("c1 requires N >= 1");
    const double r = dirichlet_ratio(x, n);
    return r * r;
}

/// C2(numerator / modulus): 1 when modulus divides numerator, else 0.
inline double c2_int(long numerator, long modulus) {
    if (modulus < 1) throw std::invalid_argument("c2_int requires modulus >= 1");
    return (numerator % modulus == 0) ? 1.0 : 0.0;
}

// ----------------------------------------------------------------------------
// Symbol-domain moments
// ----------------------------------------------------------------------------

namespace detail {

inline void check_tf_index(const GridConfig& cfg, long n, long m) {
    if (n < 0 || m < 0 || n >= static_cast<long>(cfg.n) || m >= static_cast<long>(cfg.m)) {
        throw IndexOutOfRange("TF index (" + std::to_string(n) + ", " + std::to_string(m) +
                              ") outside " + std::to_string(cfg.n) + "x" + std::to_string(cfg.m));
    }
}

}  // namespace detail

/// E{X[n1,m1] X*[n2,m2]} = N M E|x|^2 delta_{n1 n2} delta_{m1 m2}.
inline Complex pair_moment_tf(const GridConfig& cfg, const ConstellationMoments& cm, long n1, long m1, long n2,
                              long m2) {
    detail::check_tf_index(cfg, n1, m1);
    detail::check_tf_index(cfg, n2, m2);
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);
    return cm.e_abs2 * static_cast<double>(nn) * c2_int(n1 - n2, nn) * static_cast<double>(mm) *
           c2_int(m1 - m2, mm);
}

/// E{X[n1,m1] X*[n2,m2] X*[nb1,mb1] X[nb2,mb2]} for i.i.d. x and the
/// unnormalized DD -> TF transform.
inline Complex fourth_moment_tf(const GridConfig& cfg, const ConstellationMoments& cm, long n1, long m1, long n2,
                                long m2, long nb1, long mb1, long nb2, long mb2) {
    detail::check_tf_index(cfg, n1, m1);
    detail::check_tf_index(cfg, n2, m2);
    detail::check_tf_index(cfg, nb1, mb1);
    detail::check_tf_index(cfg, nb2, mb2);
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);
    const double big_n = static_cast<double>(nn);
    const double big_m = static_cast<double>(mm);

    const double all_equal = big_n * c2_int(n1 - n2 - nb1 + nb2, nn) * big_m * c2_int(m1 - m2 - mb1 + mb2, mm);
    const double self_pairs = big_n * c2_int(n1 - n2, nn) * big_n * c2_int(nb1 - nb2, nn) * big_m *
                              c2_int(m1 - m2, mm) * big_m * c2_int(mb1 - mb2, mm);
    const double cross_pairs = big_n * c2_int(n1 - nb1, nn) * big_n * c2_int(n2 - nb2, nn) * big_m *
                               c2_int(m1 - mb1, mm) * big_m * c2_int(m2 - mb2, mm);
    const double conj_pairs = big_n * c2_int(n1 + nb2, nn) * big_n * c2_int(n2 + nb1, nn) * big_m *
                              c2_int(m1 + mb2, mm) * big_m * c2_int(m2 + mb1, mm);

    const double e2sq = cm.e_abs2 * cm.e_abs2;
    return cm.e_abs4 * all_equal + e2sq * (-2.0 * all_equal + self_pairs + cross_pairs) +
           cm.e_x2_abs_sq * (-all_equal + conj_pairs);
}

// ----------------------------------------------------------------------------
// AF moments
// ----------------------------------------------------------------------------

/// |E{A^(tau, fd)}|, piecewise in tau.
inline double mean_abs_complex_af(const GridConfig& cfg, DelayDopplerPoint p) {
    const double tt = cfg.t;
    const double nm = cfg.nm();
    const double abs_tau = std::abs(p.tau);
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);

    if (abs_tau < 1e-12 * tt) {
        return nm * std::abs(sinc(kPi * static_cast<double>(nn) * tt * p.fd));
    }
    if (abs_tau >= tt) return 0.0;

    const double tf = tt * p.fd;
    const double delay_ratio = dirichlet_ratio(cfg.delta_f * p.tau, mm);  // sinc(pi M df tau) / sinc(pi df tau)
    const double overlap = std::abs(sinc(kPi * (tt - abs_tau) * p.fd));
    if (std::abs(tf - std::nearbyint(tf)) < 1e-9) {
        return nm / tt * (tt - abs_tau) * delay_ratio * overlap;
    }
    const double doppler_ratio = dirichlet_ratio(tf, nn);  // sinc(pi N T fd) / sinc(pi T fd)
    return nm / tt * (tt - abs_tau) * delay_ratio * doppler_ratio * overlap;
}

namespace detail {

// Tabulated A_g((d)T - tau, e df + fd) for d in (-N, N), e in (-M, M).
class LagTable {
public:
    LagTable(const GridConfig& cfg, DelayDopplerPoint p)
        : n_(static_cast<long>(cfg.n)), m_(static_cast<long>(cfg.m)),
          values_(static_cast<std::size_t>((2 * n_ - 1) * (2 * m_ - 1))) {
        for (long d = -(n_ - 1); d <= n_ - 1; ++d) {
            const double t_prime = d * cfg.t - p.tau;
            const bool active = std::abs(t_prime) < cfg.t;
            for (long e = -(m_ - 1); e <= m_ - 1; ++e) {
                (*this)(d, e) = active ? a_g(t_prime, e * cfg.delta_f + p.fd, cfg.t) : 0.0;
            }
        }
    }
    double& operator()(long d, long e) { return values_[(d + n_ - 1) * (2 * m_ - 1) + e + m_ - 1]; }
    double operator()(long d, long e) const { return values_[(d + n_ - 1) * (2 * m_ - 1) + e + m_ - 1]; }

private:
    long n_, m_;
    std::vector<double> values_;
};

inline long wrap(long v, long modulus) {
    const long r = v % modulus;
    return r < 0 ? r + modulus : r;
}

}  // namespace detail

/// E{A^2(tau, fd)}, exact for i.i.d. symbols with the given moments.
///
/// The eight-index term only survives on two index families:
///  * (n1-n2) = (nb1-nb2) mod N and (m1-m2) = (mb1-mb2) mod M, weighted by
///    (E|x|^4 - |E x^2|^2 - 2)/(NM). Both A_g factors vanish unless the two
///    slot lags are equal, which leaves sums over free n2, nb2, m2, mb2 that
///    factor into Dirichlet-type sums.
///  * nb2 = -n1, nb1 = -n2 (mod N), mb2 = -m1, mb1 = -m2 (mod M), weighted
///    by |E x^2|^2 (zero for square QAM).
/// The raw value before clamping is returned through raw_out when given.
inline double second_moment_af(const GridConfig& cfg, const ConstellationMoments& cm, DelayDopplerPoint p,
                               double* raw_out = nullptr) {
    const long nn = static_cast<long>(cfg.n);
    const long mm = static_cast<long>(cfg.m);
    const double tt = cfg.t;
    const double df = cfg.delta_f;
    const double nm = cfg.nm();
    const detail::LagTable ag(cfg, p);

    const double ag0 = a_g(-p.tau, p.fd, tt);
    const double coherent = nm * nm * ag0 * ag0 * c1(tt * p.fd, nn) * c1(df * p.tau, mm);

    double incoherent = 0.0;
    for (long d = -(nn - 1); d <= nn - 1; ++d) {
        for (long e = -(mm - 1); e <= mm - 1; ++e) {
            const double v = ag(d, e);
            incoherent += static_cast<double>(nn - std::abs(d)) * static_cast<double>(mm - std::abs(e)) * v * v;
        }
    }

    // Kurtosis family.
    double kurtosis = 0.0;
    const double excess = cm.e_abs4 - cm.e_x2_abs_sq - 2.0 * cm.e_abs2 * cm.e_abs2;
    if (excess != 0.0) {
        // lag_sum[e] = sum over valid m2 of e^{j 2 pi m2 df tau}, m2 + e in [0, M)
        std::vector<Complex> lag_sum(static_cast<std::size_t>(2 * mm - 1));
        for (long e = -(mm - 1); e <= mm - 1; ++e) {
            Complex s{};
            for (long m2 = std::max(0L, -e); m2 < std::min(mm, mm - e); ++m2) {
                s += std::polar(1.0, 2.0 * kPi * m2 * df * p.tau);
            }
            lag_sum[e + mm - 1] = s;
        }
        double acc = 0.0;
        for (long d = -(nn - 1); d <= nn - 1; ++d) {
            if (!(std::abs(d * tt - p.tau) < tt)) continue;
            Complex slot_sum{};
            for (long n2 = std::max(0L, -d); n2 < std::min(nn, nn - d); ++n2) {
                slot_sum += std::polar(1.0, 2.0 * kPi * n2 * tt * p.fd);
            }
            const double slot_weight = std::norm(slot_sum);
            for (long e = -(mm - 1); e <= mm - 1; ++e) {
                const double va = ag(d, e);
                if (va == 0.0) continue;
                for (long eb : {e - mm, e, e + mm}) {
                    if (eb <= -mm || eb >= mm) continue;
                    const double vb = ag(d, eb);
                    if (vb == 0.0) continue;
                    const double sign = af_term_sign(d, e) * af_term_sign(d, eb);
                    const Complex phase = std::polar(1.0, kPi * static_cast<double>(e - eb) * df * p.tau);
                    acc += sign * slot_weight * va * vb *
                           (phase * lag_sum[e + mm - 1] * std::conj(lag_sum[eb + mm - 1])).real();
                }
            }
        }
        kurtosis = excess / nm * acc;
    }

    // Pseudo-covariance family.
    double pseudo = 0.0;
    if (cm.e_x2_abs_sq != 0.0) {
        double acc = 0.0;
        for (long n1 = 0; n1 < nn; ++n1) {
            for (long n2 = 0; n2 < nn; ++n2) {
                const long nb2 = detail::wrap(-n1, nn);
                const long nb1 = detail::wrap(-n2, nn);
                const long d = n1 - n2;
                const long db = nb1 - nb2;
                for (long m1 = 0; m1 < mm; ++m1) {
                    for (long m2 = 0; m2 < mm; ++m2) {
                        const long mb2 = detail::wrap(-m1, mm);
                        const long mb1 = detail::wrap(-m2, mm);
                        const long e = m1 - m2;
                        const long eb = mb1 - mb2;
                        const double va = ag(d, e);
                        const double vb = ag(db, eb);
                        if (va == 0.0 || vb == 0.0) continue;
                        const double sign = af_term_sign(d, e) * af_term_sign(db, eb);
                        const double angle = kPi * static_cast<double>(m1 + m2 - mb1 - mb2) * df * p.tau +
                                             kPi * static_cast<double>(n1 + n2 - nb1 - nb2) * tt * p.fd;
                        acc += sign * va * vb * std::cos(angle);
                    }
                }
            }
        }
        pseudo = cm.e_x2_abs_sq * acc;
    }

    const double raw = cm.e_abs2 * cm.e_abs2 * (coherent + incoherent) + kurtosis + pseudo;
    if (raw_out != nullptr) *raw_out = raw;
    return std::max(raw, 0.0);
}

struct JensenBounds {
    double mean_lower = 0.0;  // |E{A^}|
    double mean_upper = 0.0;  // sqrt(E{A^2})
    double var_upper = 0.0;   // 2 sigma^2
};

inline JensenBounds jensen_bounds(const GridConfig& cfg, const ConstellationMoments& cm, DelayDopplerPoint p) {
    const double mean_abs = mean_abs_complex_af(cfg, p);
    const double second = second_moment_af(cfg, cm, p);
    const double sigma2 = std::max(0.0, 0.5 * (second - mean_abs * mean_abs));
    return {mean_abs, std::sqrt(second), 2.0 * sigma2};
}

// ----------------------------------------------------------------------------
// Rice approximation
// ----------------------------------------------------------------------------

struct RiceParams {
    double nu = 0.0;     // |E{A^}|
    double sigma = 0.0;  // per-component standard deviation

    static RiceParams from_moments(double mean_abs_complex, double second_moment) {
        const double sigma2 = std::max(0.0, 0.5 * (second_moment - mean_abs_complex * mean_abs_complex));
        return {mean_abs_complex, std::sqrt(sigma2)};
    }
};

struct RiceMoments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Mean sigma sqrt(pi/2) L_{1/2}(-nu^2 / (2 sigma^2)); variance nu^2 + 2 sigma^2 - mean^2.
inline RiceMoments rice_moments(const RiceParams& rp) {
    if (rp.nu < 0.0 || rp.sigma < 0.0) throw std::invalid_argument("Rice parameters must be >= 0");
    if (rp.sigma == 0.0) return {rp.nu, 0.0};
    const double sigma2 = rp.sigma * rp.sigma;
    const double mean = rp.sigma * std::sqrt(kPi / 2.0) * laguerre_half(-(rp.nu * rp.nu) / (2.0 * sigma2));
    const double second = rp.nu * rp.nu + 2.0 * sigma2;
    return {mean, std::max(0.0, second - mean * mean)};
}

// ----------------------------------------------------------------------------
// Surfaces
// ----------------------------------------------------------------------------

struct MomentSurfaces {
    AfAxes axes;
    RealMatrix mean_abs_complex;  // |E{A^}|
    RealMatrix second_moment;     // E{A^2}
    RealMatrix rice_mean;
    RealMatrix rice_var;
    RealMatrix mean_lower;
    RealMatrix mean_upper;
    RealMatrix var_upper;
    RealMatrix sigma2_raw;  // (E{A^2} - |E{A^}|^2) / 2 before clamping at 0
};

inline MomentSurfaces moment_surfaces(const GridConfig& cfg, const ConstellationMoments& cm, const AfAxes& axes,
                                      unsigned threads = default_thread_count()) {
    axes.validate();
    const std::size_t rows = axes.tau_values.size();
    const std::size_t cols = axes.fd_values.size();
    MomentSurfaces out;
    out.axes = axes;
    for (RealMatrix* m : {&out.mean_abs_complex, &out.second_moment, &out.rice_mean, &out.rice_var,
                          &out.mean_lower, &out.mean_upper, &out.var_upper, &out.sigma2_raw}) {
        *m = RealMatrix(rows, cols);
    }

    parallel_for(
        rows,
        [&](std::size_t i) {
            for (std::size_t j = 0; j < cols; ++j) {
                const DelayDopplerPoint p{axes.tau_values[i], axes.fd_values[j]};
                const double nu = mean_abs_complex_af(cfg, p);
                double raw_second = 0.0;
                second_moment_af(cfg, cm, p, &raw_second);
                const double sigma2_raw = 0.5 * (raw_second - nu * nu);
                const double sigma2 = std::max(0.0, sigma2_raw);
                // keep the Rice identity exact: E{A^2} := nu^2 + 2 sigma^2 after the clamp
                const double second = nu * nu + 2.0 * sigma2;
                const RiceMoments rice = rice_moments({nu, std::sqrt(sigma2)});

                out.mean_abs_complex(i, j) = nu;
                out.second_moment(i, j) = second;
                out.sigma2_raw(i, j) = sigma2_raw;
                out.rice_mean(i, j) = rice.mean;
                out.rice_var(i, j) = rice.variance;
                out.mean_lower(i, j) = nu;
                out.mean_upper(i, j) = std::sqrt(second);
                out.var_upper(i, j) = 2.0 * sigma2;
            }
        },
        threads);
    return out;
}

}  // namespace otfsaf
