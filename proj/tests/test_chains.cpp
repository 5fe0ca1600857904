#include "qwht/chain.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qwht;
using Catch::Approx;

namespace {

Graph path3() {
    Graph g;
    g.n = 3;
    g.directed = false;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
    return g;
}

Graph k2() {
    Graph g;
    g.n = 2;
    g.directed = false;
    g.edges = {{0, 1, 1.0}};
    return g;
}

Graph k3() {
    Graph g;
    g.n = 3;
    g.directed = false;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    return g;
}

Graph cycle3_directed() {
    Graph g;
    g.n = 3;
    g.directed = true;
    g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}};
    return g;
}

}  // namespace

TEST_CASE("transition matrix from graph") {
    StochasticMatrix p = transition_from_graph(path3());
    CHECK(p.m(0, 1) == 1.0);
    CHECK(p.m(1, 0) == 0.5);
    CHECK(p.m(1, 2) == 0.5);
    CHECK(p.m(2, 1) == 1.0);

    StochasticMatrix pk2 = transition_from_graph(k2());
    CHECK(pk2.m(0, 1) == 1.0);
    CHECK(pk2.m(1, 0) == 1.0);

    StochasticMatrix pc = transition_from_graph(circulant_with_loops(3, {0, 1}));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(pc.m(i, j) == Approx(1.0 / 3).margin(1e-15));

    Graph dangling;
    dangling.n = 2;
    dangling.directed = true;
    dangling.edges = {{0, 1, 1.0}};
    CHECK_THROWS_WITH(transition_from_graph(dangling), Catch::Matchers::ContainsSubstring("1"));
}

TEST_CASE("stationary distribution") {
    Distribution pi = stationary(transition_from_graph(path3()));
    CHECK(pi.w(0) == Approx(0.25).margin(1e-12));
    CHECK(pi.w(1) == Approx(0.5).margin(1e-12));
    CHECK(pi.w(2) == Approx(0.25).margin(1e-12));

    Distribution pic = stationary(transition_from_graph(cycle3_directed()));
    for (int i = 0; i < 3; ++i) CHECK(pic.w(i) == Approx(1.0 / 3).margin(1e-12));

    // degree/2N formula on a barbell
    Graph bb = barbell(30, 30);
    Eigen::MatrixXd a = bb.adjacency();
    double two_n = a.sum();
    Distribution pib = stationary(transition_from_graph(bb));
    for (int i = 0; i < bb.n; ++i) CHECK(pib.w(i) == Approx(a.row(i).sum() / two_n).margin(1e-12));

    Graph disconnected;
    disconnected.n = 4;
    disconnected.directed = false;
    disconnected.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(stationary(transition_from_graph(disconnected)), std::invalid_argument);
}

TEST_CASE("power-iteration stationary approximation") {
    StochasticMatrix p = transition_from_graph(barbell(4, 2));
    Distribution exact = stationary(p);
    Distribution approx = stationary_power(p, 2000, 1e-13);
    CHECK((approx.w - exact.w).lpNorm<1>() < 1e-9);
}

TEST_CASE("distribution constructors") {
    Distribution u = uniform_distribution(4);
    for (int i = 0; i < 4; ++i) CHECK(u.w(i) == 0.25);

    Distribution d = dirac_like(180, 0, 0.01);
    CHECK(d.w(0) == Approx(1.0 / (1.0 + 1.79)).margin(1e-12));
    CHECK(d.w(1) == Approx(0.01 / (1.0 + 1.79)).margin(1e-12));

    StochasticMatrix p = transition_from_graph(path3());
    Distribution pi = stationary(p);
    Distribution eps0 = eps_stationary(pi, 0.0, 123);
    CHECK((eps0.w - pi.w).lpNorm<1>() < 1e-14);

    Distribution r1 = random_distribution(10, 3);
    Distribution r2 = random_distribution(10, 3);
    CHECK((r1.w - r2.w).norm() == 0.0);
    CHECK(r1.w.sum() == Approx(1.0).margin(1e-12));

    Eigen::VectorXd bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(custom_distribution(bad), std::invalid_argument);
}

TEST_CASE("reversed chain") {
    StochasticMatrix p = transition_from_graph(path3());

    SECTION("reversible with sigma = pi gives back P") {
        Distribution pi = stationary(p);
        ReversedChain rc = reversed_chain(p, pi);
        CHECK(rc.exact_flag);
        CHECK((rc.p_star.m - p.m).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((rc.row_scale - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-12);
        // balance equation P_ij pi_i = pi_j P*_ji
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(p.m(i, j) * pi.w(i) == Approx(pi.w(j) * rc.p_star.m(j, i)).margin(1e-10));
    }

    SECTION("uniform sigma on the path, hand computed") {
        ReversedChain rc = reversed_chain(p, uniform_distribution(3));
        CHECK_FALSE(rc.exact_flag);
        CHECK(rc.row_scale(0) == Approx(0.5).margin(1e-14));
        CHECK(rc.row_scale(1) == Approx(2.0).margin(1e-14));
        CHECK(rc.row_scale(2) == Approx(0.5).margin(1e-14));
        CHECK((rc.p_star.m - p.m).cwiseAbs().maxCoeff() < 1e-14);  // P-hat = P^T, Dr^-1 P^T = P
    }

    SECTION("directed 3-cycle with uniform sigma") {
        StochasticMatrix pc = transition_from_graph(cycle3_directed());
        ReversedChain rc = reversed_chain(pc, uniform_distribution(3));
        CHECK(rc.exact_flag);
        CHECK((rc.p_star.m - pc.m.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((rc.row_scale - Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("zero in-degree node is rejected") {
        Graph g;
        g.n = 2;
        g.directed = true;
        g.edges = {{0, 0, 1.0}, {1, 0, 1.0}};
        StochasticMatrix bad = transition_from_graph(g);
        CHECK_THROWS_WITH(reversed_chain(bad, uniform_distribution(2)),
                          Catch::Matchers::ContainsSubstring("1"));
    }
}

TEST_CASE("absorbing modification") {
    StochasticMatrix p = transition_from_graph(k2());
    StochasticMatrix pt = absorb(p, MarkedSet{1});
    CHECK(pt.m(0, 1) == 1.0);
    CHECK(pt.m(1, 1) == 1.0);
    CHECK(pt.m(1, 0) == 0.0);

    StochasticMatrix twice = absorb(pt, MarkedSet{1});
    CHECK((twice.m - pt.m).cwiseAbs().maxCoeff() == 0.0);

    StochasticMatrix p3 = transition_from_graph(k3());
    StochasticMatrix most = absorb(p3, MarkedSet{0, 2});
    CHECK(most.m(0, 0) == 1.0);
    CHECK(most.m(2, 2) == 1.0);
    CHECK(most.m(1, 0) == 0.5);

    CHECK_THROWS_AS(absorb(p, MarkedSet{0, 1}), std::invalid_argument);
}

TEST_CASE("classical hitting time") {
    StochasticMatrix p = transition_from_graph(k2());
    CHECK(classical_ht(p, uniform_distribution(2), MarkedSet{1}) == Approx(0.5).margin(1e-14));

    StochasticMatrix p3 = transition_from_graph(k3());
    CHECK(classical_ht(p3, uniform_distribution(3), MarkedSet{2}) ==
          Approx(4.0 / 3.0).margin(1e-12));
}

TEST_CASE("hitting time matrix") {
    StochasticMatrix p = transition_from_graph(k2());
    Eigen::MatrixXd h = hitting_time_matrix(p);
    CHECK(h(0, 0) == 0.0);
    CHECK(h(0, 1) == Approx(1.0).margin(1e-12));
    CHECK(h(1, 0) == Approx(1.0).margin(1e-12));

    Eigen::MatrixXd h3 = hitting_time_matrix(transition_from_graph(k3()));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(h3(i, j) == Approx(i == j ? 0.0 : 2.0).margin(1e-12));

    Eigen::MatrixXd hp = hitting_time_matrix(transition_from_graph(path3()));
    CHECK(hp(0, 2) == Approx(4.0).margin(1e-12));
}

TEST_CASE("hitting time matrix satisfies the recursion") {
    for (const Graph& g : {barbell(4, 2), path3(), circulant_with_loops(7, {0, 1, 2})}) {
        StochasticMatrix p = transition_from_graph(g);
        Eigen::MatrixXd h = hitting_time_matrix(p);
        for (int i = 0; i < p.n(); ++i) {
            for (int j = 0; j < p.n(); ++j) {
                if (i == j) continue;
                double rhs = 1.0 + p.m.row(i).dot(h.col(j));
                CHECK(std::abs(h(i, j) - rhs) < 1e-10);
            }
        }
    }
}

TEST_CASE("classical_ht consistent with hitting matrix") {
    Graph g = barbell(4, 3);
    StochasticMatrix p = transition_from_graph(g);
    Distribution sigma = random_distribution(g.n, 17);
    Eigen::MatrixXd h = hitting_time_matrix(p);
    for (int j = 0; j < g.n; ++j) {
        double expected = 0.0;
        for (int i = 0; i < g.n; ++i)
            if (i != j) expected += sigma.w(i) * h(i, j);
        double got = classical_ht(p, sigma, MarkedSet{j});
        CHECK(got == Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("kemeny constant") {
    CHECK(kemeny(transition_from_graph(k2())) == Approx(0.5).margin(1e-12));
    CHECK(kemeny(transition_from_graph(cycle3_directed())) == Approx(1.0).margin(1e-12));

    // vertex-transitive: kemeny equals the hitting time into any single node
    StochasticMatrix pc = transition_from_graph(circulant_with_loops(9, {0, 1, 2}));
    Distribution pi = stationary(pc);
    CHECK(kemeny(pc) == Approx(classical_ht(pc, pi, MarkedSet{0})).epsilon(1e-10));

    CHECK(kemeny(pc) == Approx([&] {
        double s = 0.0;
        for (int j = 0; j < pc.n(); ++j) s += pi.w(j) * classical_ht(pc, pi, MarkedSet{j});
        return s;
    }()).epsilon(1e-8));
}

TEST_CASE("spectral classical hitting time") {
    SECTION("1x1 case on K2") {
        StochasticMatrix p = transition_from_graph(k2());
        Distribution pi = stationary(p);
        SpectralHittingTime s = classical_ht_spectral(p, pi, MarkedSet{1});
        REQUIRE(s.terms.size() == 1);
        CHECK(s.sum == Approx(0.5).margin(1e-12));
    }

    SECTION("agrees with the direct formula") {
        for (const Graph& g : {barbell(5, 2), circulant_with_loops(8, {0, 1, 3})}) {
            StochasticMatrix p = transition_from_graph(g);
            Distribution pi = stationary(p);
            double direct = classical_ht(p, pi, MarkedSet{0});
            CHECK(classical_ht_spectral(p, pi, MarkedSet{0}).sum == Approx(direct).epsilon(1e-6));
        }
    }

    SECTION("directed graph with general sigma") {
        Graph g = erdos_renyi_directed(10, 0.5, 3);
        StochasticMatrix p = transition_from_graph(g);
        Distribution sigma = random_distribution(10, 5);
        double direct = classical_ht(p, sigma, MarkedSet{2});
        CHECK(classical_ht_spectral(p, sigma, MarkedSet{2}).sum == Approx(direct).epsilon(1e-6));
    }
}

TEST_CASE("monte carlo oracle agrees with the solve") {
    StochasticMatrix p = transition_from_graph(k2());
    MonteCarloHt mc = monte_carlo_ht(p, uniform_distribution(2), MarkedSet{1}, 20000, 1000, 11);
    CHECK(mc.truncated == 0);
    CHECK(std::abs(mc.mean - 0.5) <= 3.0 * mc.stderr_);

    StochasticMatrix p3 = transition_from_graph(k3());
    MonteCarloHt mc3 = monte_carlo_ht(p3, uniform_distribution(3), MarkedSet{2}, 20000, 1000, 13);
    CHECK(std::abs(mc3.mean - 4.0 / 3.0) <= 3.0 * mc3.stderr_);

    // unreachable marked set: every trajectory truncates
    Graph trap;
    trap.n = 3;
    trap.directed = true;
    trap.edges = {{0, 1, 1.0}, {1, 0, 1.0}, {2, 2, 1.0}};
    StochasticMatrix pt = transition_from_graph(trap);
    Eigen::VectorXd w(3);
    w << 0.5, 0.5, 1e-9;
    MonteCarloHt stuck = monte_carlo_ht(pt, custom_distribution(w), MarkedSet{2}, 100, 50, 7);
    CHECK(stuck.truncated >= 99);
}

TEST_CASE("monte carlo matches the solve on reversible graphs") {
    for (const Graph& g : {barbell(3, 1), circulant_with_loops(6, {0, 1})}) {
        StochasticMatrix p = transition_from_graph(g);
        Distribution pi = stationary(p);
        double exact = classical_ht(p, pi, MarkedSet{0});
        MonteCarloHt mc = monte_carlo_ht(p, pi, MarkedSet{0}, 20000, 100000, 21);
        CHECK(mc.truncated == 0);
        CHECK(std::abs(mc.mean - exact) <= 3.0 * mc.stderr_);
    }
}
