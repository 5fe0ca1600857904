#pragma once

// Quantum layer: matrix-free Szegedy walk built from a forward chain and
// its (generalized) reversal, discriminant SVD classification, and the
// absorbing walk with its block-diagonal discriminant.

#include "qwht/chain.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <vector>

namespace qwht {

/// State on the doubled space C^{n^2}; pair (x, y) lives at flat index
/// x*n + y. Amplitudes are real throughout (square roots of
/// probabilities, reflected by real operators).
struct WalkState {
    Eigen::VectorXd amplitudes;

    int dim() const { return static_cast<int>(amplitudes.size()); }
    double norm() const { return amplitudes.norm(); }
};

/// Szegedy walk: the isometries A and B-hat are never assembled; only the
/// entrywise square roots of the forward and backward chains are kept.
struct SzegedyWalk {
    int n = 0;
    StochasticMatrix forward;   // P (or absorbed P)
    StochasticMatrix backward;  // generalized reversal (or its absorbed form)
    Eigen::MatrixXd sqrt_forward;
    Eigen::MatrixXd sqrt_backward;

    Eigen::MatrixXd discriminant() const {
        Eigen::MatrixXd d(n, n);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) d(x, y) = sqrt_forward(x, y) * sqrt_backward(y, x);
        return d;
    }
};

namespace detail {

inline SzegedyWalk make_walk(const StochasticMatrix& fwd, const StochasticMatrix& bwd) {
    SzegedyWalk w;
    w.n = fwd.n();
    w.forward = fwd;
    w.backward = bwd;
    w.sqrt_forward = fwd.m.cwiseSqrt();
    w.sqrt_backward = bwd.m.cwiseSqrt();
    return w;
}

}  // namespace detail

inline SzegedyWalk build_walk(const StochasticMatrix& p, const Distribution& sigma) {
    ReversedChain rc = reversed_chain(p, sigma);
    return detail::make_walk(p, rc.p_star);
}

/// Absorb both the forward chain and its reversal; this yields the
/// block-diagonal discriminant (identity on M, unmarked principal block
/// of the unabsorbed discriminant elsewhere), which is verified here.
inline SzegedyWalk build_absorbing_walk(const StochasticMatrix& p, const Distribution& sigma,
                                        const MarkedSet& marked) {
    marked.check_against(p.n());
    ReversedChain rc = reversed_chain(p, sigma);
    SzegedyWalk base = detail::make_walk(p, rc.p_star);
    SzegedyWalk w = detail::make_walk(absorb(p, marked), absorb(rc.p_star, marked));

    Eigen::MatrixXd d = base.discriminant();
    Eigen::MatrixXd dt = w.discriminant();
    for (int x = 0; x < w.n; ++x) {
        for (int y = 0; y < w.n; ++y) {
            bool xm = marked.contains(x), ym = marked.contains(y);
            double expect = (xm || ym) ? (x == y ? 1.0 : 0.0) : d(x, y);
            if (std::abs(dt(x, y) - expect) > 1e-12)
                throw std::logic_error("build_absorbing_walk: block structure violated at (" +
                                       std::to_string(x) + "," + std::to_string(y) + ")");
        }
    }
    return w;
}

/// One walk step R_B(R_A(s)), matrix-free.
inline WalkState apply_walk(const SzegedyWalk& w, const WalkState& s) {
    const int n = w.n;
    if (s.dim() != n * n) throw std::invalid_argument("apply_walk: state dimension mismatch");
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> smat(s.amplitudes.data(), n, n);

    // reflect through span(A): columns of A index x, entries sqrtP(x,y)
    Eigen::VectorXd a = (w.sqrt_forward.cwiseProduct(smat)).rowwise().sum();
    RowMat s1 = 2.0 * (a.asDiagonal() * w.sqrt_forward) - smat;

    // reflect through span(B-hat): columns index y, entries sqrtPstar(y,x)
    Eigen::MatrixXd bt = w.sqrt_backward.transpose();
    Eigen::VectorXd b = (bt.cwiseProduct(s1)).colwise().sum();
    RowMat s2 = 2.0 * (bt * b.asDiagonal()) - s1;

    WalkState out;
    out.amplitudes = Eigen::Map<const Eigen::VectorXd>(s2.data(), n * n);
    return out;
}

/// xi_0 = A sqrt(sigma): amplitude sqrt(sigma_x) sqrt(P_xy) at (x, y).
/// The forward chain here must be the unabsorbed P.
inline WalkState initial_state(const SzegedyWalk& w, const Distribution& sigma) {
    if (sigma.n() != w.n) throw std::invalid_argument("initial_state: dimension mismatch");
    WalkState s;
    s.amplitudes.resize(w.n * w.n);
    for (int x = 0; x < w.n; ++x)
        for (int y = 0; y < w.n; ++y)
            s.amplitudes(x * w.n + y) = std::sqrt(sigma.w(x)) * w.sqrt_forward(x, y);
    return s;
}

/// xi_0 = xi_M + xi_{-M}, both unnormalized; <xi_M|xi_M> = p.
inline std::pair<WalkState, WalkState> split_state(const SzegedyWalk& w, const Distribution& sigma,
                                                   const MarkedSet& marked) {
    marked.check_against(w.n);
    WalkState sm, su;
    sm.amplitudes = Eigen::VectorXd::Zero(w.n * w.n);
    su.amplitudes = Eigen::VectorXd::Zero(w.n * w.n);
    for (int x = 0; x < w.n; ++x) {
        auto& dst = marked.contains(x) ? sm : su;
        for (int y = 0; y < w.n; ++y)
            dst.amplitudes(x * w.n + y) = std::sqrt(sigma.w(x)) * w.sqrt_forward(x, y);
    }
    return {sm, su};
}

/// SVD of a discriminant matrix with the {1, interior, 0} classification.
struct SpectralData {
    Eigen::VectorXd singular_values;  // descending
    Eigen::MatrixXd left_vectors;
    Eigen::MatrixXd right_vectors;
    std::vector<double> angles;  // arccos(sv) for interior values, index-aligned with `interior`
    std::vector<int> class_one;
    std::vector<int> class_interior;
    std::vector<int> class_zero;
};

inline SpectralData spectral(const Eigen::MatrixXd& d, double tol = 1e-10) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeFullU | Eigen::ComputeFullV);
    SpectralData out;
    out.singular_values = svd.singularValues();
    out.left_vectors = svd.matrixU();
    out.right_vectors = svd.matrixV();
    for (Eigen::Index k = 0; k < out.singular_values.size(); ++k) {
        double sv = out.singular_values(k);
        if (sv > 1.0 + 1e-12 || sv < -1e-12)
            throw std::runtime_error("spectral: singular value " + std::to_string(sv) +
                                     " outside [0,1]");
        sv = std::clamp(sv, 0.0, 1.0);
        out.singular_values(k) = sv;
        if (sv >= 1.0 - tol) {
            out.class_one.push_back(static_cast<int>(k));
        } else if (sv <= tol) {
            out.class_zero.push_back(static_cast<int>(k));
        } else {
            out.class_interior.push_back(static_cast<int>(k));
            out.angles.push_back(std::acos(sv));
        }
    }
    return out;
}

/// nu = S^T [0; sqrt(sigma_{-M})] with S the left singular vectors of the
/// absorbing discriminant; ||nu||^2 = 1 - p.
inline Eigen::VectorXd nu_coefficients(const SpectralData& spec, const Distribution& sigma,
                                       const MarkedSet& marked) {
    const int n = static_cast<int>(spec.singular_values.size());
    if (sigma.n() != n) throw std::invalid_argument("nu_coefficients: dimension mismatch");
    marked.check_against(n);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        if (!marked.contains(i)) z(i) = std::sqrt(sigma.w(i));
    return spec.left_vectors.transpose() * z;
}

struct SpectralTheoremReport {
    double max_rotation_residual = 0.0;   // eigenvector relation for interior angles
    double max_fixed_residual = 0.0;      // class-one vectors under the walk
    double max_invariance_residual = 0.0; // span{Au_k, Bv_k} maps into itself
};

namespace detail {

inline WalkState apply_a(const SzegedyWalk& w, const Eigen::VectorXd& c) {
    WalkState s;
    s.amplitudes.resize(w.n * w.n);
    for (int x = 0; x < w.n; ++x)
        for (int y = 0; y < w.n; ++y) s.amplitudes(x * w.n + y) = c(x) * w.sqrt_forward(x, y);
    return s;
}

inline WalkState apply_b(const SzegedyWalk& w, const Eigen::VectorXd& c) {
    WalkState s;
    s.amplitudes.resize(w.n * w.n);
    for (int x = 0; x < w.n; ++x)
        for (int y = 0; y < w.n; ++y) s.amplitudes(x * w.n + y) = c(y) * w.sqrt_backward(y, x);
    return s;
}

}  // namespace detail

/// Dense verification of the walk eigenstructure predicted by the
/// discriminant SVD; report-only, guarded to small n.
inline SpectralTheoremReport verify_spectral_theorem(const SzegedyWalk& w,
                                                     const SpectralData& spec) {
    if (w.n > 200) throw std::invalid_argument("verify_spectral_theorem: n > 200 guard");
    SpectralTheoremReport rep;
    using Cd = std::complex<double>;
    auto apply_complex = [&](const Eigen::VectorXcd& v) {
        WalkState re{v.real()}, im{v.imag()};
        Eigen::VectorXcd out = apply_walk(w, re).amplitudes.cast<Cd>() +
                               Cd(0, 1) * apply_walk(w, im).amplitudes.cast<Cd>();
        return out;
    };
    for (std::size_t idx = 0; idx < spec.class_interior.size(); ++idx) {
        int k = spec.class_interior[idx];
        double theta = spec.angles[idx];
        WalkState au = detail::apply_a(w, spec.left_vectors.col(k));
        WalkState bv = detail::apply_b(w, spec.right_vectors.col(k));
        Eigen::VectorXcd vec = au.amplitudes.cast<Cd>() -
                               std::exp(Cd(0, -theta)) * bv.amplitudes.cast<Cd>();
        Eigen::VectorXcd mapped = apply_complex(vec);
        double res = (mapped - std::exp(Cd(0, -2.0 * theta)) * vec).norm();
        rep.max_rotation_residual = std::max(rep.max_rotation_residual, res);

        // invariant plane of Remark on span{Au, Bv}
        Eigen::VectorXd u1 = au.amplitudes;
        Eigen::VectorXd u2 = bv.amplitudes - bv.amplitudes.dot(u1) * u1;
        double u2n = u2.norm();
        if (u2n > 1e-12) {
            u2 /= u2n;
            for (const Eigen::VectorXd& basis : {u1, u2}) {
                Eigen::VectorXd img = apply_walk(w, WalkState{basis}).amplitudes;
                Eigen::VectorXd resid = img - img.dot(u1) * u1 - img.dot(u2) * u2;
                rep.max_invariance_residual = std::max(rep.max_invariance_residual, resid.norm());
            }
        }
    }
    for (int k : spec.class_one) {
        WalkState au = detail::apply_a(w, spec.left_vectors.col(k));
        double res = (apply_walk(w, au).amplitudes - au.amplitudes).norm();
        rep.max_fixed_residual = std::max(rep.max_fixed_residual, res);
    }
    return rep;
}

}  // namespace qwht
