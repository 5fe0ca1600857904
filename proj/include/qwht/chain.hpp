#pragma once

// Classical Markov-chain layer: transition matrices, distributions,
// exact and generalized reversal, absorbing modification, hitting times
// and the Kemeny constant.

#include "qwht/graph.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace qwht {

constexpr double kRowSumTol = 1e-12;

/// Row-stochastic matrix.
struct StochasticMatrix {
    Eigen::MatrixXd m;

    StochasticMatrix() = default;
    explicit StochasticMatrix(Eigen::MatrixXd mat) : m(std::move(mat)) { validate(); }

    int n() const { return static_cast<int>(m.rows()); }

    void validate() const {
        if (m.rows() != m.cols()) throw std::invalid_argument("stochastic matrix must be square");
        if ((m.array() < 0.0).any())
            throw std::invalid_argument("stochastic matrix has a negative entry");
        for (int i = 0; i < m.rows(); ++i) {
            if (std::abs(m.row(i).sum() - 1.0) > kRowSumTol)
                throw std::invalid_argument("row " + std::to_string(i) +
                                            " of stochastic matrix does not sum to 1");
        }
    }
};

/// Strictly positive probability vector.
struct Distribution {
    Eigen::VectorXd w;

    Distribution() = default;
    explicit Distribution(Eigen::VectorXd v) : w(std::move(v)) { validate(); }

    int n() const { return static_cast<int>(w.size()); }

    void validate() const {
        if ((w.array() <= 0.0).any())
            throw std::invalid_argument("distribution has a nonpositive weight");
        if (std::abs(w.sum() - 1.0) > kRowSumTol)
            throw std::invalid_argument("distribution does not sum to 1");
    }
};

/// Nonempty proper subset of node indices, kept sorted.
struct MarkedSet {
    std::vector<int> members;

    MarkedSet() = default;
    MarkedSet(std::initializer_list<int> init) : members(init) { normalize(); }
    explicit MarkedSet(std::vector<int> init) : members(std::move(init)) { normalize(); }

    int m() const { return static_cast<int>(members.size()); }

    bool contains(int i) const {
        return std::binary_search(members.begin(), members.end(), i);
    }

    void check_against(int n) const {
        if (members.empty()) throw std::invalid_argument("marked set must be nonempty");
        if (members.front() < 0 || members.back() >= n)
            throw std::invalid_argument("marked node index out of range");
        if (m() >= n) throw std::invalid_argument("marked set must be a proper subset");
    }

    std::vector<int> complement(int n) const {
        std::vector<int> out;
        out.reserve(n - m());
        for (int i = 0; i < n; ++i)
            if (!contains(i)) out.push_back(i);
        return out;
    }

private:
    void normalize() {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
    }
};

/// Generalized reversed chain P* = D_r^{-1} diag(sigma)^{-1} P^T diag(sigma).
/// exact_flag is set when sigma is stationary for P, in which case the
/// row scale is the identity and the balance equation holds.
struct ReversedChain {
    StochasticMatrix p_star;
    Eigen::VectorXd row_scale;  // diagonal of D_r
    bool exact_flag = false;
};

inline StochasticMatrix transition_from_graph(const Graph& g) {
    Eigen::MatrixXd a = g.adjacency();
    for (int i = 0; i < g.n; ++i) {
        double s = a.row(i).sum();
        if (s <= 0.0)
            throw std::invalid_argument("transition_from_graph: dangling node " + std::to_string(i));
        a.row(i) /= s;
    }
    return StochasticMatrix(a);
}

inline bool is_irreducible(const StochasticMatrix& p) {
    return strongly_connected(p.m);
}

/// Stationary distribution by direct solve of the singular system with
/// the last balance equation replaced by the normalization sum(pi) = 1.
inline Distribution stationary(const StochasticMatrix& p, double tol = 1e-10) {
    if (!is_irreducible(p))
        throw std::invalid_argument("stationary: transition matrix is reducible");
    const int n = p.n();
    Eigen::MatrixXd sys = p.m.transpose() - Eigen::MatrixXd::Identity(n, n);
    sys.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::VectorXd pi = sys.colPivHouseholderQr().solve(rhs);
    double residual = (p.m.transpose() * pi - pi).lpNorm<1>();
    if (residual > tol) {
        throw std::runtime_error("stationary: solve residual " + std::to_string(residual) +
                                 " exceeds tolerance");
    }
    pi /= pi.sum();
    return Distribution(pi);
}

/// Stationary distribution by power iteration (rough-approximation path).
inline Distribution stationary_power(const StochasticMatrix& p, int iterations,
                                     std::optional<double> tol = std::nullopt) {
    const int n = p.n();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXd next = p.m.transpose() * v;
        next /= next.sum();
        if (tol && (next - v).lpNorm<1>() <= *tol) {
            v = next;
            break;
        }
        v = next;
    }
    if ((v.array() <= 0.0).any())
        throw std::runtime_error("stationary_power: iterate not strictly positive yet");
    return Distribution(v);
}

inline Distribution uniform_distribution(int n) {
    return Distribution(Eigen::VectorXd::Constant(n, 1.0 / n));
}

inline Distribution degree_distribution(const Graph& g, bool out) {
    Eigen::MatrixXd a = g.adjacency();
    Eigen::VectorXd d = out ? Eigen::VectorXd(a.rowwise().sum())
                            : Eigen::VectorXd(a.colwise().sum().transpose());
    if ((d.array() <= 0.0).any())
        throw std::invalid_argument("degree_distribution: zero-degree node");
    return Distribution(d / d.sum());
}

/// sigma = |pi o (1 + eps * randn)| renormalized.
inline Distribution eps_stationary(const Distribution& pi, double eps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(pi.n());
    for (int i = 0; i < pi.n(); ++i) v(i) = std::abs(pi.w(i) * (1.0 + eps * gauss(rng)));
    return Distribution(v / v.sum());
}

/// Weight 1 on the chosen node, delta elsewhere, renormalized.
inline Distribution dirac_like(int n, int node, double delta = 1e-2) {
    if (node < 0 || node >= n) throw std::invalid_argument("dirac_like: node out of range");
    if (delta <= 0.0) throw std::invalid_argument("dirac_like: delta must be positive");
    Eigen::VectorXd v = Eigen::VectorXd::Constant(n, delta);
    v(node) = 1.0;
    return Distribution(v / v.sum());
}

/// Fresh strictly positive draw of uniform random weights, normalized.
inline Distribution random_distribution(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        double x = unif(rng);
        while (x <= 0.0) x = unif(rng);
        v(i) = x;
    }
    return Distribution(v / v.sum());
}

inline Distribution custom_distribution(const Eigen::VectorXd& v) {
    if ((v.array() <= 0.0).any())
        throw std::invalid_argument("custom_distribution: nonpositive entry");
    return Distribution(v / v.sum());
}

inline ReversedChain reversed_chain(const StochasticMatrix& p, const Distribution& sigma) {
    const int n = p.n();
    if (sigma.n() != n) throw std::invalid_argument("reversed_chain: dimension mismatch");
    Eigen::MatrixXd hat(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) hat(y, x) = p.m(x, y) * sigma.w(x) / sigma.w(y);
    Eigen::VectorXd row_scale = hat.rowwise().sum();
    for (int y = 0; y < n; ++y) {
        if (row_scale(y) <= 0.0)
            throw std::invalid_argument("reversed_chain: node " + std::to_string(y) +
                                        " has no incoming edge of positive weight");
    }
    Eigen::MatrixXd pstar = row_scale.cwiseInverse().asDiagonal() * hat;
    ReversedChain rc;
    rc.p_star = StochasticMatrix(pstar);
    rc.row_scale = row_scale;
    rc.exact_flag = (p.m.transpose() * sigma.w - sigma.w).lpNorm<1>() <= 1e-10;
    return rc;
}

/// Rows of marked nodes replaced by self-loop indicators.
inline StochasticMatrix absorb(const StochasticMatrix& p, const MarkedSet& marked) {
    marked.check_against(p.n());
    Eigen::MatrixXd out = p.m;
    for (int i : marked.members) {
        out.row(i).setZero();
        out(i, i) = 1.0;
    }
    return StochasticMatrix(out);
}

namespace detail {

/// Every unmarked node must reach the marked set for I - P_{-M} to be
/// nonsingular; checked structurally via backward BFS from M.
inline void check_marked_reachable(const StochasticMatrix& p, const MarkedSet& marked) {
    const int n = p.n();
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    for (int i : marked.members) {
        seen[i] = 1;
        q.push(i);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int u = 0; u < n; ++u) {
            if (!seen[u] && p.m(u, v) > 0.0) {
                seen[u] = 1;
                q.push(u);
            }
        }
    }
    for (int i = 0; i < n; ++i)
        if (!seen[i])
            throw std::runtime_error("marked set unreachable from node " + std::to_string(i));
}

inline Eigen::MatrixXd principal_submatrix(const Eigen::MatrixXd& a, const std::vector<int>& idx) {
    Eigen::MatrixXd out(idx.size(), idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) out(r, c) = a(idx[r], idx[c]);
    return out;
}

inline Eigen::VectorXd subvector(const Eigen::VectorXd& v, const std::vector<int>& idx) {
    Eigen::VectorXd out(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) out(r) = v(idx[r]);
    return out;
}

}  // namespace detail

/// H_{sigma,M} = sigma_{-M}^T (I - P_{-M})^{-1} 1. The restriction of
/// sigma is not renormalized.
inline double classical_ht(const StochasticMatrix& p, const Distribution& sigma,
                           const MarkedSet& marked) {
    marked.check_against(p.n());
    detail::check_marked_reachable(p, marked);
    std::vector<int> unmarked = marked.complement(p.n());
    Eigen::MatrixXd pmm = detail::principal_submatrix(p.m, unmarked);
    const auto k = static_cast<Eigen::Index>(unmarked.size());
    Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(k, k) - pmm;
    Eigen::VectorXd z = sys.partialPivLu().solve(Eigen::VectorXd::Ones(k));
    return detail::subvector(sigma.w, unmarked).dot(z);
}

/// All pairwise hitting times; H_{ii} = 0, one absorbing solve per target.
inline Eigen::MatrixXd hitting_time_matrix(const StochasticMatrix& p) {
    if (!is_irreducible(p))
        throw std::invalid_argument("hitting_time_matrix: transition matrix is reducible");
    const int n = p.n();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        MarkedSet mj{j};
        std::vector<int> unmarked = mj.complement(n);
        Eigen::MatrixXd pmm = detail::principal_submatrix(p.m, unmarked);
        const auto k = static_cast<Eigen::Index>(unmarked.size());
        Eigen::MatrixXd sys = Eigen::MatrixXd::Identity(k, k) - pmm;
        Eigen::VectorXd z = sys.partialPivLu().solve(Eigen::VectorXd::Ones(k));
        for (std::size_t r = 0; r < unmarked.size(); ++r) h(unmarked[r], j) = z(r);
    }
    return h;
}

/// Kemeny constant: doubly pi-averaged hitting time.
inline double kemeny(const StochasticMatrix& p) {
    Distribution pi = stationary(p);
    Eigen::MatrixXd h = hitting_time_matrix(p);
    return pi.w.dot(h * pi.w);
}

struct SpectralHittingTime {
    std::vector<std::complex<double>> terms;
    double sum = 0.0;
};

/// Eigen-expansion of the classical hitting time: terms x_i y_i / (1 - lambda_i)
/// of the matrix D_{-M} Dr_{-M}^{1/2}, which is similar to P_{-M}.
inline SpectralHittingTime classical_ht_spectral(const StochasticMatrix& p,
                                                 const Distribution& sigma,
                                                 const MarkedSet& marked,
                                                 double cond_threshold = 1e10) {
    marked.check_against(p.n());
    detail::check_marked_reachable(p, marked);
    ReversedChain rc = reversed_chain(p, sigma);
    const int n = p.n();
    Eigen::MatrixXd disc(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) disc(x, y) = std::sqrt(p.m(x, y) * rc.p_star.m(y, x));
    std::vector<int> unmarked = marked.complement(n);
    Eigen::MatrixXd dm = detail::principal_submatrix(disc, unmarked);
    Eigen::VectorXd dr = detail::subvector(rc.row_scale, unmarked);
    Eigen::MatrixXd g = dm * dr.cwiseSqrt().asDiagonal();

    Eigen::EigenSolver<Eigen::MatrixXd> es(g);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("classical_ht_spectral: eigendecomposition failed");
    Eigen::MatrixXcd v = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(v);
    double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    if (!(cond < cond_threshold))
        throw std::runtime_error(
            "classical_ht_spectral: near-defective eigenbasis (cond " + std::to_string(cond) +
            "); use the direct formula instead");

    Eigen::VectorXcd srt = detail::subvector(sigma.w, unmarked).cwiseSqrt();
    Eigen::VectorXcd x = v.transpose() * srt;
    Eigen::VectorXcd y = v.partialPivLu().solve(srt);

    SpectralHittingTime out;
    std::complex<double> total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        std::complex<double> term = x(i) * y(i) / (1.0 - es.eigenvalues()(i));
        out.terms.push_back(term);
        total += term;
    }
    if (std::abs(total.imag()) > 1e-8)
        throw std::runtime_error("classical_ht_spectral: sum has nonreal part " +
                                 std::to_string(total.imag()));
    out.sum = total.real();
    return out;
}

struct MonteCarloHt {
    double mean = 0.0;
    double stderr_ = 0.0;
    int truncated = 0;
};

/// Empirical first-arrival oracle: simulated trajectories from sigma,
/// truncated at cap steps.
inline MonteCarloHt monte_carlo_ht(const StochasticMatrix& p, const Distribution& sigma,
                                   const MarkedSet& marked, int samples, int cap,
                                   std::uint64_t seed) {
    if (samples < 1 || cap < 1) throw std::invalid_argument("monte_carlo_ht: samples and cap must be >= 1");
    marked.check_against(p.n());
    const int n = p.n();
    double sum = 0.0, sumsq = 0.0;
    int truncated = 0;
    for (int s = 0; s < samples; ++s) {
        // per-trajectory RNG stream derived from the seed
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        auto draw = [&](const Eigen::VectorXd& probs) {
            double u = unif(rng), acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += probs(i);
                if (u < acc) return i;
            }
            return n - 1;
        };
        int node = draw(sigma.w);
        int t = 0;
        while (!marked.contains(node) && t < cap) {
            node = draw(p.m.row(node).transpose());
            ++t;
        }
        if (!marked.contains(node)) ++truncated;
        sum += t;
        sumsq += double(t) * t;
    }
    MonteCarloHt out;
    out.mean = sum / samples;
    double var = std::max(0.0, sumsq / samples - out.mean * out.mean);
    out.stderr_ = std::sqrt(var / samples);
    out.truncated = truncated;
    return out;
}

}  // namespace qwht
