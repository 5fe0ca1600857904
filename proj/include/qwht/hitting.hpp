#pragma once

// Quantum hitting time: Cesaro averages of the absorbing walk's
// deviation from its initial state, interpolated crossing of the 1 - p
// threshold, spectral Cesaro sums, and the analytic upper bounds.

#include "qwht/szegedy.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

namespace qwht {

/// F(T) for T = 0..T_last. `crossing_index` is the first T with
/// F(T) strictly above the threshold 1 - p; absent when truncated.
struct FSeries {
    std::vector<double> values;
    double threshold = 0.0;
    std::optional<int> crossing_index;
    bool truncated = false;
};

inline int default_t_max(int n) { return 50 * n; }

/// Iterate the absorbing walk from xi_0 = A sqrt(sigma) of the original
/// chain, accumulating the Cesaro average of squared deviations.
inline FSeries f_series(const StochasticMatrix& p, const Distribution& sigma,
                        const MarkedSet& marked, int t_max, bool stop_at_crossing = true) {
    if (t_max < 1) throw std::invalid_argument("f_series: t_max must be >= 1");
    marked.check_against(p.n());
    ReversedChain rc = reversed_chain(p, sigma);
    SzegedyWalk base = detail::make_walk(p, rc.p_star);
    SzegedyWalk absorbed = detail::make_walk(absorb(p, marked), absorb(rc.p_star, marked));

    WalkState psi0 = initial_state(base, sigma);
    double pmass = 0.0;
    for (int i : marked.members) pmass += sigma.w(i);

    FSeries out;
    out.threshold = 1.0 - pmass;
    out.values.reserve(16);
    WalkState s = psi0;
    double accum = 0.0;
    for (int t = 0; t <= t_max; ++t) {
        if (t > 0) s = apply_walk(absorbed, s);
        accum += (s.amplitudes - psi0.amplitudes).squaredNorm();
        double f = accum / (t + 1);
        out.values.push_back(f);
        if (!out.crossing_index && f > out.threshold) {
            out.crossing_index = t;
            if (stop_at_crossing) return out;
        }
    }
    out.truncated = !out.crossing_index.has_value();
    return out;
}

/// Linear interpolation between (T0-1, F(T0-1)) and (T0, F(T0)) at the
/// threshold; F(-1) never enters since F(0) = 0 < 1 - p.
inline double interpolate_crossing(const FSeries& fs) {
    if (!fs.crossing_index) throw std::invalid_argument("interpolate_crossing: no crossing");
    int t0 = *fs.crossing_index;
    if (t0 == 0) return 0.0;
    double f0 = fs.values[t0 - 1];
    double f1 = fs.values[t0];
    return (t0 - 1) + (fs.threshold - f0) / (f1 - f0);
}

/// Closed-form Cesaro average of cos(2 t theta) over t = 0..T.
inline double cesaro_cos(double theta, int T) {
    double c = std::cos(2.0 * theta);
    return (std::cos(2.0 * T * theta) - std::cos(2.0 * (T + 1) * theta) + 1.0 - c) /
           (2.0 * (T + 1) * (1.0 - c));
}

/// B(z, T) for z = sum_k nu_k Phi_k from the absorbing discriminant's
/// spectral data: stationary components contribute 1, interior ones the
/// closed form, singular-value-zero ones the Cesaro mean of (-1)^t.
inline double cesaro_spectral(const SpectralData& spec, const Eigen::VectorXd& nu, int T) {
    double b = 0.0;
    for (int k : spec.class_one) b += nu(k) * nu(k);
    for (std::size_t i = 0; i < spec.class_interior.size(); ++i) {
        int k = spec.class_interior[i];
        b += nu(k) * nu(k) * cesaro_cos(spec.angles[i], T);
    }
    double alt = (T % 2 == 0) ? 1.0 / (T + 1) : 0.0;  // mean of (-1)^t
    for (int k : spec.class_zero) b += nu(k) * nu(k) * alt;
    return b;
}

/// (64 / (1-p)) sum nu_k^2 / theta_k over the unmarked spectrum; a zero
/// singular value contributes with angle pi/2.
inline double qhe_bound(const SpectralData& spec, const Eigen::VectorXd& nu, double p) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("qhe_bound: need 0 <= p < 1");
    for (int k : spec.class_one) {
        if (nu(k) * nu(k) > 1e-10)
            throw std::runtime_error(
                "qhe_bound: nu mass on a stationary component; the marked set is not "
                "reachable and the bound is vacuous");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < spec.class_interior.size(); ++i) {
        int k = spec.class_interior[i];
        sum += nu(k) * nu(k) / spec.angles[i];
    }
    for (int k : spec.class_zero) sum += nu(k) * nu(k) / (std::numbers::pi / 2.0);
    return 64.0 / (1.0 - p) * sum;
}

/// 64 / sqrt(1-p) * sqrt(h): the quadratic-speedup bound.
inline double che_bound(double h, double p) {
    if (h < 0.0) throw std::invalid_argument("che_bound: h must be >= 0");
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("che_bound: need 0 <= p < 1");
    return 64.0 / std::sqrt(1.0 - p) * std::sqrt(h);
}

/// Per-node hitting quantities. qh is empty when the walk never crossed
/// the threshold within t_max; max_f then records the best F attained.
struct HitReport {
    MarkedSet marked;
    std::optional<double> qh;
    double max_f = 0.0;
    double qhe = 0.0;
    double che = 0.0;
    double h = 0.0;
    double sh = 0.0;
    double p = 0.0;
};

inline HitReport quantum_ht(const StochasticMatrix& p, const Distribution& sigma,
                            const MarkedSet& marked, int t_max = 0) {
    if (t_max <= 0) t_max = default_t_max(p.n());
    HitReport rep;
    rep.marked = marked;
    for (int i : marked.members) rep.p += sigma.w(i);
    rep.h = classical_ht(p, sigma, marked);
    rep.sh = std::sqrt(rep.h);
    rep.che = che_bound(rep.h, rep.p);

    SzegedyWalk absorbed = build_absorbing_walk(p, sigma, marked);
    SpectralData spec = spectral(absorbed.discriminant());
    Eigen::VectorXd nu = nu_coefficients(spec, sigma, marked);
    rep.qhe = qhe_bound(spec, nu, rep.p);

    FSeries fs = f_series(p, sigma, marked, t_max);
    if (fs.crossing_index) {
        rep.qh = interpolate_crossing(fs);
        rep.max_f = fs.values.back();
    } else {
        rep.max_f = *std::max_element(fs.values.begin(), fs.values.end());
    }
    return rep;
}

struct SpeedupCheck {
    bool applicable = false;
    bool theorem_ok = false;    // qh <= che (guaranteed for reversible sigma = pi)
    bool empirical_ok = false;  // qh <= sqrt(h) (observed, not asserted)
};

inline SpeedupCheck speedup_check(const HitReport& rep) {
    SpeedupCheck out;
    if (!rep.qh) return out;
    out.applicable = true;
    out.theorem_ok = *rep.qh <= rep.che;
    out.empirical_ok = *rep.qh <= rep.sh;
    return out;
}

}  // namespace qwht
