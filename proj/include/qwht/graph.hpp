#pragma once

// Graph families used throughout the library: circulant-with-loops,
// barbell, Barabasi-Albert, directed Erdos-Renyi and random regular
// graphs, plus JSON persistence.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwht {

struct FamilyTag {
    std::string family;
    std::map<std::string, double> params;
    std::uint64_t seed = 0;

    bool operator==(const FamilyTag&) const = default;
};

struct Edge {
    int u = 0;
    int v = 0;
    double w = 1.0;

    bool operator==(const Edge&) const = default;
};

/// Weighted graph. Undirected graphs store each {i,j} edge once and are
/// expanded symmetrically when the adjacency matrix is assembled; a self
/// loop is a single relation i->i and contributes its weight once to the
/// diagonal.
struct Graph {
    int n = 0;
    bool directed = false;
    std::vector<Edge> edges;
    std::optional<FamilyTag> family_tag;

    Eigen::MatrixXd adjacency() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (const Edge& e : edges) {
            a(e.u, e.v) += e.w;
            if (!directed && e.u != e.v) a(e.v, e.u) += e.w;
        }
        return a;
    }

    void validate() const {
        if (n <= 0) throw std::invalid_argument("graph: node count must be positive");
        for (const Edge& e : edges) {
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n)
                throw std::invalid_argument("graph: edge endpoint out of range");
            if (e.w < 0.0) throw std::invalid_argument("graph: negative edge weight");
        }
        Eigen::MatrixXd a = adjacency();
        for (int i = 0; i < n; ++i) {
            if (a.row(i).sum() <= 0.0)
                throw std::invalid_argument("graph: dangling node " + std::to_string(i) +
                                            " has no outgoing edge of positive weight");
        }
    }
};

namespace detail {

inline bool reachable_all(const Eigen::MatrixXd& a, bool transpose) {
    const int n = static_cast<int>(a.rows());
    std::vector<char> seen(n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int count = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int v = 0; v < n; ++v) {
            double w = transpose ? a(v, u) : a(u, v);
            if (w > 0.0 && !seen[v]) {
                seen[v] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n;
}

}  // namespace detail

/// Strong connectivity of the positive-entry pattern (for undirected
/// graphs this degenerates to plain connectivity).
inline bool strongly_connected(const Eigen::MatrixXd& a) {
    return detail::reachable_all(a, false) && detail::reachable_all(a, true);
}

inline bool is_connected(const Graph& g) {
    return strongly_connected(g.adjacency());
}

/// Circulant graph where node i is adjacent to i +- k (mod n) for each
/// offset k. Offset 0 (the self loop) is mandatory.
inline Graph circulant_with_loops(int n, const std::vector<int>& offsets) {
    if (n < 3) throw std::invalid_argument("circulant_with_loops: n must be >= 3");
    if (offsets.empty()) throw std::invalid_argument("circulant_with_loops: offsets must be nonempty");
    bool has_loop = false;
    for (int k : offsets)
        if (((k % n) + n) % n == 0) has_loop = true;
    if (!has_loop)
        throw std::invalid_argument("circulant_with_loops: offset 0 (self loop) is mandatory");

    std::set<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) pairs.insert({i, i});
    for (int k : offsets) {
        int r = ((k % n) + n) % n;
        if (r == 0) continue;
        for (int i = 0; i < n; ++i) {
            int j = (i + r) % n;
            pairs.insert({std::min(i, j), std::max(i, j)});
        }
    }
    Graph g;
    g.n = n;
    g.directed = false;
    for (auto [u, v] : pairs) g.edges.push_back({u, v, 1.0});
    FamilyTag tag{"circulant", {{"n", double(n)}}, 0};
    for (std::size_t i = 0; i < offsets.size(); ++i)
        tag.params["offset" + std::to_string(i)] = double(offsets[i]);
    g.family_tag = tag;
    return g;
}

/// Two complete graphs of size m1 joined by a path of m2 nodes.
inline Graph barbell(int m1, int m2) {
    if (m1 < 3) throw std::invalid_argument("barbell: bell size must be >= 3");
    if (m2 < 0) throw std::invalid_argument("barbell: bar length must be >= 0");
    Graph g;
    g.n = 2 * m1 + m2;
    g.directed = false;
    // left bell [0, m1)
    for (int i = 0; i < m1; ++i)
        for (int j = i + 1; j < m1; ++j) g.edges.push_back({i, j, 1.0});
    // bar [m1, m1+m2) and the two connecting edges
    for (int i = m1 - 1; i < m1 + m2; ++i) g.edges.push_back({i, i + 1, 1.0});
    // right bell [m1+m2, 2*m1+m2)
    for (int i = m1 + m2; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j) g.edges.push_back({i, j, 1.0});
    g.family_tag = FamilyTag{"barbell", {{"m1", double(m1)}, {"m2", double(m2)}}, 0};
    return g;
}

/// Preferential attachment: each new node attaches to m existing nodes
/// with probability proportional to current degree.
inline Graph barabasi_albert(int n, int m, std::uint64_t seed) {
    if (m < 1 || m >= n) throw std::invalid_argument("barabasi_albert: need 1 <= m < n");
    std::mt19937_64 rng(seed);
    Graph g;
    g.n = n;
    g.directed = false;

    std::vector<int> targets(m);
    for (int i = 0; i < m; ++i) targets[i] = i;
    std::vector<int> repeated;  // node list weighted by attachment count
    for (int src = m; src < n; ++src) {
        // duplicate draws collapse to a single simple edge, but still count
        // in the attachment kernel; a node may gain fewer than m neighbors
        std::set<int> distinct;
        for (int t : targets) {
            if (distinct.insert(t).second) g.edges.push_back({src, t, 1.0});
            repeated.push_back(t);
            repeated.push_back(src);
        }
        // m degree-proportional draws with repetition
        std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
        for (int k = 0; k < m; ++k) targets[k] = repeated[pick(rng)];
    }
    g.family_tag = FamilyTag{"barabasi_albert", {{"n", double(n)}, {"m", double(m)}}, seed};
    return g;
}

/// Directed G(n, p), resampled until strongly connected.
inline Graph erdos_renyi_directed(int n, double p, std::uint64_t seed, int max_retries = 100) {
    if (p <= 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi_directed: need 0 < p <= 1");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(p);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Graph g;
        g.n = n;
        g.directed = true;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && coin(rng)) g.edges.push_back({i, j, 1.0});
        if (strongly_connected(g.adjacency())) {
            g.family_tag = FamilyTag{"erdos_renyi", {{"n", double(n)}, {"p", p}}, seed};
            return g;
        }
    }
    std::ostringstream msg;
    msg << "erdos_renyi_directed: no strongly connected sample in " << max_retries
        << " attempts (n=" << n << ", p=" << p << ")";
    throw std::runtime_error(msg.str());
}

/// Random d-regular graph via the pairing model, resampled until the
/// pairing is simple and the graph is connected.
inline Graph random_regular(int d, int n, std::uint64_t seed, int max_retries = 100) {
    if (d < 1 || d >= n) throw std::invalid_argument("random_regular: need 1 <= d < n");
    if ((static_cast<long long>(d) * n) % 2 != 0)
        throw std::invalid_argument("random_regular: d*n must be even");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        // greedy stub matching: pair shuffled stubs, keep re-shuffling the
        // conflicting leftovers; rejecting whole pairings would almost
        // never produce a simple graph at moderate degree
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(d) * n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < d; ++k) stubs.push_back(i);
        std::set<std::pair<int, int>> pairs;
        int stalled = 0;
        while (!stubs.empty() && stalled < 50) {
            std::shuffle(stubs.begin(), stubs.end(), rng);
            std::vector<int> leftover;
            for (std::size_t s = 0; s + 1 < stubs.size(); s += 2) {
                int u = std::min(stubs[s], stubs[s + 1]);
                int v = std::max(stubs[s], stubs[s + 1]);
                if (u == v || !pairs.insert({u, v}).second) {
                    leftover.push_back(stubs[s]);
                    leftover.push_back(stubs[s + 1]);
                }
            }
            stalled = leftover.size() == stubs.size() ? stalled + 1 : 0;
            stubs = std::move(leftover);
        }
        if (!stubs.empty()) continue;
        Graph g;
        g.n = n;
        g.directed = false;
        for (auto [u, v] : pairs) g.edges.push_back({u, v, 1.0});
        if (!is_connected(g)) continue;
        g.family_tag = FamilyTag{"random_regular", {{"n", double(n)}, {"d", double(d)}}, seed};
        return g;
    }
    std::ostringstream msg;
    msg << "random_regular: no connected simple sample in " << max_retries
        << " attempts (d=" << d << ", n=" << n << ")";
    throw std::runtime_error(msg.str());
}

inline void save_graph(const Graph& g, const std::string& path) {
    nlohmann::json j;
    j["n"] = g.n;
    j["directed"] = g.directed;
    auto& je = j["edges"] = nlohmann::json::array();
    for (const Edge& e : g.edges) je.push_back({e.u, e.v, e.w});
    if (g.family_tag) {
        j["family_tag"] = {{"family", g.family_tag->family},
                           {"params", g.family_tag->params},
                           {"seed", g.family_tag->seed}};
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_graph: cannot open " + path);
    out << j.dump(2) << "\n";
}

inline Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_graph: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("load_graph: malformed JSON: ") + e.what());
    }
    Graph g;
    try {
        g.n = j.at("n").get<int>();
        g.directed = j.at("directed").get<bool>();
        for (const auto& je : j.at("edges"))
            g.edges.push_back({je.at(0).get<int>(), je.at(1).get<int>(), je.at(2).get<double>()});
        if (j.contains("family_tag")) {
            const auto& jt = j["family_tag"];
            FamilyTag tag;
            tag.family = jt.at("family").get<std::string>();
            tag.params = jt.at("params").get<std::map<std::string, double>>();
            tag.seed = jt.at("seed").get<std::uint64_t>();
            g.family_tag = tag;
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(std::string("load_graph: schema error: ") + e.what());
    }
    g.validate();
    return g;
}

}  // namespace qwht
