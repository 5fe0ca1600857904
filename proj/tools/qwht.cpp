// Command line front end: graph generation, classical/quantum hitting
// time queries, marked-node sweeps and the verification suite.

#include "qwht/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <random>

namespace {

using namespace qwht;

struct FamilyArgs {
    std::string family;
    int n = 0, m1 = 0, m2 = 0, m = 0, d = 0;
    double p = 0.0;
    std::vector<int> offsets = {0, 1};

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family, "graph family")
            ->required()
            ->check(CLI::IsMember(
                {"circulant", "barbell", "barabasi_albert", "erdos_renyi", "random_regular"}));
        cmd->add_option("--n", n, "node count");
        cmd->add_option("--m1", m1, "barbell bell size");
        cmd->add_option("--m2", m2, "barbell bar length");
        cmd->add_option("--m", m, "BA attachment count");
        cmd->add_option("--p", p, "ER edge probability");
        cmd->add_option("--d", d, "regular degree");
        cmd->add_option("--offsets", offsets, "circulant connection set (must contain 0)");
    }

    FamilyConfig config() const {
        FamilyConfig cfg;
        if (family == "circulant") {
            cfg.family = Family::Circulant;
            cfg.n = n;
            cfg.offsets = offsets;
        } else if (family == "barbell") {
            cfg.family = Family::Barbell;
            cfg.m1 = m1;
            cfg.m2 = m2;
        } else if (family == "barabasi_albert") {
            cfg.family = Family::BarabasiAlbert;
            cfg.n = n;
            cfg.m = m;
        } else if (family == "erdos_renyi") {
            cfg.family = Family::ErdosRenyi;
            cfg.n = n;
            cfg.p = p;
        } else {
            cfg.family = Family::RandomRegular;
            cfg.n = n;
            cfg.d = d;
        }
        return cfg;
    }
};

// "stationary" | "uniform" | "outdegree" | "indegree" | "dirac:NODE[:DELTA]"
// | "eps_stationary[:EPS]" | "random"
DistSpec parse_dist(const std::string& text, std::uint64_t seed) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.empty()) throw CLI::ValidationError("--dist", "empty distribution spec");
    DistSpec spec;
    spec.seed = seed;
    const std::string& kind = parts[0];
    if (kind == "uniform") spec.kind = DistKind::Uniform;
    else if (kind == "stationary") spec.kind = DistKind::Stationary;
    else if (kind == "outdegree") spec.kind = DistKind::OutDegree;
    else if (kind == "indegree") spec.kind = DistKind::InDegree;
    else if (kind == "random") spec.kind = DistKind::Random;
    else if (kind == "eps_stationary") {
        spec.kind = DistKind::EpsStationary;
        if (parts.size() > 1) spec.eps = std::stod(parts[1]);
    } else if (kind == "dirac") {
        spec.kind = DistKind::Dirac;
        if (parts.size() < 2) throw CLI::ValidationError("--dist", "dirac needs a node: dirac:NODE[:DELTA]");
        spec.node = std::stoi(parts[1]);
        if (parts.size() > 2) spec.delta = std::stod(parts[2]);
    } else {
        throw CLI::ValidationError("--dist", "unknown distribution kind '" + kind + "'");
    }
    return spec;
}

void print_report(const HitReport& r) {
    std::cout << std::fixed << std::setprecision(3);
    std::cout << "marked:";
    for (int i : r.marked.members) std::cout << " " << i;
    std::cout << "\np      = " << r.p << "\n";
    if (r.qh)
        std::cout << "qh     = " << *r.qh << "\n";
    else
        std::cout << "qh     = inf (max F " << r.max_f << ")\n";
    std::cout << "qhe    = " << r.qhe << "\n"
              << "che    = " << r.che << "\n"
              << "h      = " << r.h << "\n"
              << "sqrt h = " << r.sh << "\n";
}

int run_verify(const FamilyConfig& cfg, std::uint64_t seed) {
    Graph g = generate_graph(cfg, seed);
    StochasticMatrix p = transition_from_graph(g);
    Distribution pi = stationary(p);
    SzegedyWalk walk = build_walk(p, pi);
    const int n = p.n();
    std::cout << "graph: " << cfg.name() << ", n = " << n << "\n";
    std::cout << std::scientific << std::setprecision(3);

    // norm preservation over random unit states
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double norm_res = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        WalkState s;
        s.amplitudes.resize(n * n);
        for (int i = 0; i < n * n; ++i) s.amplitudes(i) = gauss(rng);
        s.amplitudes.normalize();
        norm_res = std::max(norm_res, std::abs(apply_walk(walk, s).norm() - 1.0));
    }
    std::cout << "walk norm preservation residual:   " << norm_res << "\n";

    // fixed point of the unmodified walk
    WalkState xi0 = initial_state(walk, pi);
    double fix_res = (apply_walk(walk, xi0).amplitudes - xi0.amplitudes).norm();
    std::cout << "xi_0 fixed point residual:         " << fix_res << "\n";

    // spectral theorem
    SpectralData spec = spectral(walk.discriminant());
    SpectralTheoremReport rep = verify_spectral_theorem(walk, spec);
    std::cout << "eigenvector rotation residual:     " << rep.max_rotation_residual << "\n";
    std::cout << "stationary subspace residual:      " << rep.max_fixed_residual << "\n";
    std::cout << "invariant plane residual:          " << rep.max_invariance_residual << "\n";

    // dual-path Cesaro agreement and bounds at the first node
    MarkedSet m0{0};
    SzegedyWalk absorbed = build_absorbing_walk(p, pi, m0);
    SpectralData aspec = spectral(absorbed.discriminant());
    Eigen::VectorXd nu = nu_coefficients(aspec, pi, m0);
    auto [psi_m, psi_u] = split_state(walk, pi, m0);
    WalkState s = psi_u;
    double accum = 0.0, dual_res = 0.0;
    int t_cap = std::min(200, default_t_max(n));
    for (int t = 0; t <= t_cap; ++t) {
        if (t > 0) s = apply_walk(absorbed, s);
        accum += psi_u.amplitudes.dot(s.amplitudes);
        dual_res = std::max(dual_res, std::abs(accum / (t + 1) - cesaro_spectral(aspec, nu, t)));
    }
    std::cout << "dual-path Cesaro residual:         " << dual_res << "\n";

    HitReport hit = quantum_ht(p, pi, m0);
    bool bounds_ok = hit.qh && *hit.qh <= hit.che && *hit.qh <= hit.qhe;
    std::cout << std::fixed << std::setprecision(3);
    std::cout << "node 0: qh = " << (hit.qh ? *hit.qh : -1.0) << ", qhe = " << hit.qhe
              << ", che = " << hit.che << ", sqrt h = " << hit.sh << "\n";

    bool ok = norm_res <= 1e-12 && fix_res <= 1e-10 && rep.max_rotation_residual <= 1e-8 &&
              rep.max_fixed_residual <= 1e-8 && rep.max_invariance_residual <= 1e-8 &&
              dual_res <= 1e-8 && bounds_ok;
    std::cout << (ok ? "all residual checks pass" : "RESIDUAL CHECK FAILED") << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classical and Szegedy quantum hitting times on finite graphs"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a graph file");
    FamilyArgs gen_fam;
    gen_fam.attach(gen);
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output path")->required();

    // classical / quantum
    std::string ht_graph, ht_dist = "stationary";
    int ht_marked = 0, ht_tmax = 0;
    std::uint64_t ht_seed = 0;
    auto attach_ht = [&](CLI::App* cmd) {
        cmd->add_option("--graph", ht_graph, "graph file")->required();
        cmd->add_option("--dist", ht_dist, "distribution spec");
        cmd->add_option("--marked", ht_marked, "marked node")->required();
        cmd->add_option("--seed", ht_seed, "seed for randomized distributions");
        cmd->add_option("--tmax", ht_tmax, "walk step cap (default 50n)");
    };
    auto* classical = app.add_subcommand("classical", "classical hitting time of a graph file");
    attach_ht(classical);
    auto* quantum = app.add_subcommand("quantum", "quantum hitting time of a graph file");
    attach_ht(quantum);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "marked-node sweep with optional trials");
    FamilyArgs sweep_fam;
    sweep_fam.attach(sweep);
    std::string sweep_dist = "stationary", sweep_csv, sweep_summary_csv;
    int sweep_trials = 1, sweep_tmax = 0;
    std::uint64_t sweep_seed = 0;
    sweep->add_option("--dist", sweep_dist, "distribution spec");
    sweep->add_option("--trials", sweep_trials, "graph samples to average");
    sweep->add_option("--seed", sweep_seed, "base RNG seed");
    sweep->add_option("--tmax", sweep_tmax, "walk step cap (default 50n)");
    sweep->add_option("--csv", sweep_csv, "per-node CSV output path");
    sweep->add_option("--summary-csv", sweep_summary_csv, "summary CSV output path");

    // verify
    auto* verify = app.add_subcommand("verify", "run the property suite on a generated graph");
    FamilyArgs verify_fam;
    verify_fam.attach(verify);
    std::uint64_t verify_seed = 0;
    verify->add_option("--seed", verify_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            Graph g = generate_graph(gen_fam.config(), gen_seed);
            save_graph(g, gen_out);
            std::cout << "wrote " << gen_out << " (" << g.n << " nodes, " << g.edges.size()
                      << " edges)\n";
        } else if (classical->parsed() || quantum->parsed()) {
            Graph g = load_graph(ht_graph);
            StochasticMatrix p = transition_from_graph(g);
            Distribution sigma = make_distribution(parse_dist(ht_dist, ht_seed), g, p);
            MarkedSet marked{ht_marked};
            if (classical->parsed()) {
                double h = classical_ht(p, sigma, marked);
                std::cout << std::fixed << std::setprecision(3) << "h = " << h << "\n";
            } else {
                print_report(quantum_ht(p, sigma, marked, ht_tmax));
            }
        } else if (sweep->parsed()) {
            FamilyConfig cfg = sweep_fam.config();
            DistSpec dist = parse_dist(sweep_dist, sweep_seed);
            SweepSummary summary = trial_sweep(cfg, dist, sweep_trials, sweep_seed, sweep_tmax);
            std::cout << std::fixed << std::setprecision(3) << "n = " << summary.n
                      << ", mqh = " << summary.mqh << ", mqhe = " << summary.mqhe
                      << ", mche = " << summary.mche << ", msh = " << summary.msh
                      << ", mh = " << summary.mh << "\n";
            if (!sweep_csv.empty()) emit_per_node_csv(summary.per_node, sweep_csv);
            if (!sweep_summary_csv.empty()) emit_summary_csv({summary}, sweep_summary_csv);
        } else if (verify->parsed()) {
            return run_verify(verify_fam.config(), verify_seed);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
