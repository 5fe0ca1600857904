#pragma once

// Experiment driver: marked-node sweeps, multi-seed trial statistics,
// and CSV emission.

#include "qwht/hitting.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace qwht {

enum class Family { Circulant, Barbell, BarabasiAlbert, ErdosRenyi, RandomRegular };

struct FamilyConfig {
    Family family = Family::Barbell;
    int n = 0;                 // circulant / BA / ER / regular node count
    int m1 = 0, m2 = 0;        // barbell
    int m = 0;                 // BA attachment count
    double p = 0.0;            // ER edge probability
    int d = 0;                 // regular degree
    std::vector<int> offsets = {0, 1};  // circulant connection set

    std::string name() const {
        switch (family) {
            case Family::Circulant: return "circulant";
            case Family::Barbell: return "barbell";
            case Family::BarabasiAlbert: return "barabasi_albert";
            case Family::ErdosRenyi: return "erdos_renyi";
            case Family::RandomRegular: return "random_regular";
        }
        return "?";
    }

    bool randomized() const {
        return family == Family::BarabasiAlbert || family == Family::ErdosRenyi ||
               family == Family::RandomRegular;
    }
};

inline Graph generate_graph(const FamilyConfig& cfg, std::uint64_t seed) {
    switch (cfg.family) {
        case Family::Circulant: return circulant_with_loops(cfg.n, cfg.offsets);
        case Family::Barbell: return barbell(cfg.m1, cfg.m2);
        case Family::BarabasiAlbert: return barabasi_albert(cfg.n, cfg.m, seed);
        case Family::ErdosRenyi: return erdos_renyi_directed(cfg.n, cfg.p, seed);
        case Family::RandomRegular: return random_regular(cfg.d, cfg.n, seed);
    }
    throw std::logic_error("generate_graph: unknown family");
}

enum class DistKind { Uniform, Stationary, OutDegree, InDegree, EpsStationary, Dirac, Random, Custom };

struct DistSpec {
    DistKind kind = DistKind::Stationary;
    int node = 0;          // Dirac
    double eps = 1e-2;     // EpsStationary
    double delta = 1e-2;   // Dirac
    std::uint64_t seed = 0;
    Eigen::VectorXd custom;

    std::string name() const {
        switch (kind) {
            case DistKind::Uniform: return "uniform";
            case DistKind::Stationary: return "stationary";
            case DistKind::OutDegree: return "outdegree";
            case DistKind::InDegree: return "indegree";
            case DistKind::EpsStationary: return "eps_stationary";
            case DistKind::Dirac: return "dirac";
            case DistKind::Random: return "random";
            case DistKind::Custom: return "custom";
        }
        return "?";
    }
};

inline Distribution make_distribution(const DistSpec& spec, const Graph& g,
                                      const StochasticMatrix& p) {
    switch (spec.kind) {
        case DistKind::Uniform: return uniform_distribution(p.n());
        case DistKind::Stationary: return stationary(p);
        case DistKind::OutDegree: return degree_distribution(g, true);
        case DistKind::InDegree: return degree_distribution(g, false);
        case DistKind::EpsStationary: return eps_stationary(stationary(p), spec.eps, spec.seed);
        case DistKind::Dirac: return dirac_like(p.n(), spec.node, spec.delta);
        case DistKind::Random: return random_distribution(p.n(), spec.seed);
        case DistKind::Custom: return custom_distribution(spec.custom);
    }
    throw std::logic_error("make_distribution: unknown kind");
}

/// Node-averaged statistics of a sweep over single marked vertices.
struct SweepSummary {
    double mqh = 0.0;
    double mqhe = 0.0;
    double mche = 0.0;
    double msh = 0.0;  // mean of per-node sqrt(h), not sqrt(mean h)
    double mh = 0.0;
    std::string family;
    std::string dist;
    int n = 0;
    int trials = 1;
    std::uint64_t seed = 0;
    std::vector<HitReport> per_node;
};

inline int thread_count() {
    if (const char* env = std::getenv("QWHT_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Sweep every node as the sole marked vertex; parallel over nodes, with
/// results assembled by node index so the output is order-independent.
inline SweepSummary node_sweep(const StochasticMatrix& p, const Distribution& sigma,
                               int t_max = 0) {
    const int n = p.n();
    SweepSummary out;
    out.n = n;
    out.per_node.resize(n);

    std::vector<std::exception_ptr> errors(n);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int j = next.fetch_add(1); j < n; j = next.fetch_add(1)) {
            try {
                out.per_node[j] = quantum_ht(p, sigma, MarkedSet{j}, t_max);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    int threads = std::min(thread_count(), n);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (int j = 0; j < n; ++j)
        if (errors[j]) std::rethrow_exception(errors[j]);

    for (int j = 0; j < n; ++j) {
        const HitReport& r = out.per_node[j];
        if (!r.qh)
            throw std::runtime_error("node_sweep: infinite quantum hitting time at node " +
                                     std::to_string(j) + " (max F " + std::to_string(r.max_f) + ")");
        out.mqh += *r.qh;
        out.mqhe += r.qhe;
        out.mche += r.che;
        out.msh += r.sh;
        out.mh += r.h;
    }
    out.mqh /= n;
    out.mqhe /= n;
    out.mche /= n;
    out.msh /= n;
    out.mh /= n;
    return out;
}

/// Average of node_sweep statistics over independently seeded graph
/// samples; the sigma draw for randomized distributions is fixed once
/// per trial from the trial's derived seed.
inline SweepSummary trial_sweep(const FamilyConfig& cfg, DistSpec dist, int trials,
                                std::uint64_t seed, int t_max = 0) {
    if (trials < 1) throw std::invalid_argument("trial_sweep: trials must be >= 1");
    SweepSummary total;
    for (int t = 0; t < trials; ++t) {
        std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
        Graph g = generate_graph(cfg, trial_seed);
        StochasticMatrix p = transition_from_graph(g);
        dist.seed = trial_seed ^ 0x5deece66dULL;
        Distribution sigma = make_distribution(dist, g, p);
        SweepSummary s = node_sweep(p, sigma, t_max);
        total.mqh += s.mqh;
        total.mqhe += s.mqhe;
        total.mche += s.mche;
        total.msh += s.msh;
        total.mh += s.mh;
        if (t == 0) {
            total.per_node = std::move(s.per_node);
            total.n = s.n;
        }
    }
    total.mqh /= trials;
    total.mqhe /= trials;
    total.mche /= trials;
    total.msh /= trials;
    total.mh /= trials;
    total.family = cfg.name();
    total.dist = dist.name();
    total.trials = trials;
    total.seed = seed;
    return total;
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3) << v;
    return os.str();
}

}  // namespace detail

/// Per-node file: node, qh, qhe, che, h, sh.
inline void emit_per_node_csv(const std::vector<HitReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_per_node_csv: cannot open " + path);
    out << "node,qh,qhe,che,h,sh\n";
    for (std::size_t j = 0; j < reports.size(); ++j) {
        const HitReport& r = reports[j];
        out << j << "," << (r.qh ? detail::fmt(*r.qh) : "inf") << "," << detail::fmt(r.qhe) << ","
            << detail::fmt(r.che) << "," << detail::fmt(r.h) << "," << detail::fmt(r.sh) << "\n";
    }
}

/// Summary file: n, family, dist, mqh, mqhe, mche, msh, mh, trials, seed.
inline void emit_summary_csv(const std::vector<SweepSummary>& summaries, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_summary_csv: cannot open " + path);
    out << "n,family,dist,mqh,mqhe,mche,msh,mh,trials,seed\n";
    for (const SweepSummary& s : summaries) {
        out << s.n << "," << s.family << "," << s.dist << "," << detail::fmt(s.mqh) << ","
            << detail::fmt(s.mqhe) << "," << detail::fmt(s.mche) << "," << detail::fmt(s.msh)
            << "," << detail::fmt(s.mh) << "," << s.trials << "," << s.seed << "\n";
    }
}

}  // namespace qwht
