#include "saer/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "saer/rng.hpp"

namespace saer {

namespace {

// Presence structure for (client, server) pairs during generation and
// parsing. Uses a bit matrix up to 16384 nodes per side (32 MiB), a hash set
// of packed pairs beyond that.
class EdgeFilter {
public:
    explicit EdgeFilter(std::uint32_t n) : n_(n) {
        if (n_ <= 16384) {
            words_per_row_ = (n_ + 63) / 64;
            bits_.assign(static_cast<std::size_t>(n_) * words_per_row_, 0);
        }
    }

    bool test(std::uint32_t v, std::uint32_t u) const {
        if (!bits_.empty()) {
            return bits_[static_cast<std::size_t>(v) * words_per_row_ + u / 64] >> (u % 64) & 1;
        }
        return set_.contains(pack(v, u));
    }

    void set(std::uint32_t v, std::uint32_t u) {
        if (!bits_.empty()) {
            bits_[static_cast<std::size_t>(v) * words_per_row_ + u / 64] |= 1ULL << (u % 64);
        } else {
            set_.insert(pack(v, u));
        }
    }

    void clear(std::uint32_t v, std::uint32_t u) {
        if (!bits_.empty()) {
            bits_[static_cast<std::size_t>(v) * words_per_row_ + u / 64] &= ~(1ULL << (u % 64));
        } else {
            set_.erase(pack(v, u));
        }
    }

private:
    static std::uint64_t pack(std::uint32_t v, std::uint32_t u) {
        return static_cast<std::uint64_t>(v) << 32 | u;
    }

    std::uint32_t n_;
    std::size_t words_per_row_ = 0;
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::uint64_t> set_;
};

constexpr std::uint64_t kStreamMatching = 1;
constexpr std::uint64_t kStreamStubs = 2;

// One uniform random permutation of [0, n) repaired against `used` so that
// perm[v] avoids every already-present partner of v. Swap proposals come from
// the same substream; the budget bounds total proposals for this matching.
void sample_matching(std::uint32_t n, EdgeFilter& used, SplitMix64& gen,
                     std::vector<std::uint32_t>& perm) {
    perm.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    for (std::uint32_t i = n - 1; i > 0; --i) {
        const auto j = static_cast<std::uint32_t>(gen.bounded(i + 1));
        std::swap(perm[i], perm[j]);
    }

    std::uint64_t budget = 1000ULL * n;
    for (std::uint32_t v = 0; v < n; ++v) {
        while (used.test(v, perm[v])) {
            if (budget-- == 0) {
                throw std::runtime_error(
                    "generate_regular: matching repair budget exhausted");
            }
            const auto w = static_cast<std::uint32_t>(gen.bounded(n));
            if (w == v) continue;
            // Swapping must keep w's entry collision-free as well; positions
            // already fixed (w < v) stay valid because we test both sides.
            if (used.test(v, perm[w]) || used.test(w, perm[v])) continue;
            std::swap(perm[v], perm[w]);
        }
    }
}

BipartiteGraph complete_graph(std::uint32_t n) {
    std::vector<BipartiteGraph::Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * n);
    for (std::uint32_t v = 0; v < n; ++v)
        for (std::uint32_t u = 0; u < n; ++u) edges.emplace_back(v, u);
    return BipartiteGraph::from_edges(n, std::move(edges));
}

std::vector<BipartiteGraph::Edge> superpose_matchings(std::uint32_t n, std::uint32_t delta,
                                                      std::uint64_t seed) {
    EdgeFilter used(n);
    std::vector<BipartiteGraph::Edge> edges;
    edges.reserve(static_cast<std::size_t>(n) * delta);
    std::vector<std::uint32_t> perm;
    for (std::uint32_t m = 0; m < delta; ++m) {
        SplitMix64 gen(substream(seed, kStreamMatching, m));
        sample_matching(n, used, gen, perm);
        for (std::uint32_t v = 0; v < n; ++v) {
            used.set(v, perm[v]);
            edges.emplace_back(v, perm[v]);
        }
    }
    return edges;
}

}  // namespace

BipartiteGraph BipartiteGraph::from_edges(std::uint32_t n, std::vector<Edge> edges) {
    if (n == 0) throw std::invalid_argument("graph must have at least one node per side");

    std::sort(edges.begin(), edges.end());
    BipartiteGraph g;
    g.n_ = n;
    g.client_off_.assign(n + 1, 0);
    g.server_off_.assign(n + 1, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto [v, u] = edges[i];
        if (v >= n || u >= n) throw std::invalid_argument("edge index out of range");
        if (i > 0 && edges[i] == edges[i - 1]) throw std::invalid_argument("duplicate edge");
        g.client_off_[v + 1]++;
        g.server_off_[u + 1]++;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (g.client_off_[v + 1] == 0)
            throw std::invalid_argument("client " + std::to_string(v) + " has degree 0");
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        g.client_off_[i + 1] += g.client_off_[i];
        g.server_off_[i + 1] += g.server_off_[i];
    }
    g.client_adj_.resize(edges.size());
    g.server_adj_.resize(edges.size());
    std::vector<std::uint64_t> next(g.server_off_.begin(), g.server_off_.end() - 1);
    std::size_t pos = 0;
    for (const auto& [v, u] : edges) {
        g.client_adj_[pos++] = u;       // edges sorted by (v, u): client lists sorted
        g.server_adj_[next[u]++] = v;   // and server lists filled in ascending v
    }
    return g;
}

std::vector<BipartiteGraph::Edge> BipartiteGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(client_adj_.size());
    for (std::uint32_t v = 0; v < n_; ++v)
        for (const auto u : client_neighbors(v)) out.emplace_back(v, u);
    return out;
}

DegreeReport degree_report(const BipartiteGraph& g) {
    DegreeReport r;
    r.delta_min_c = std::numeric_limits<std::uint32_t>::max();
    r.delta_min_s = std::numeric_limits<std::uint32_t>::max();
    for (std::uint32_t v = 0; v < g.size(); ++v) {
        r.delta_min_c = std::min(r.delta_min_c, g.client_degree(v));
        r.delta_max_c = std::max(r.delta_max_c, g.client_degree(v));
        r.delta_min_s = std::min(r.delta_min_s, g.server_degree(v));
        r.delta_max_s = std::max(r.delta_max_s, g.server_degree(v));
    }
    r.ratio = static_cast<double>(r.delta_max_s) / static_cast<double>(r.delta_min_c);
    return r;
}

PreconditionReport check_theorem_preconditions(const BipartiteGraph& g, double eta, double rho) {
    if (eta <= 0) throw std::invalid_argument("eta must be positive");
    if (rho < 1) throw std::invalid_argument("rho must be at least 1");
    PreconditionReport rep;
    rep.degrees = degree_report(g);
    rep.eta = eta;
    rep.rho = rho;
    const double log_n = std::log(static_cast<double>(g.size()));
    rep.min_degree_required = eta * log_n * log_n;
    rep.degree_ok = static_cast<double>(rep.degrees.delta_min_c) >= rep.min_degree_required;
    rep.ratio_ok = rep.degrees.ratio <= rho;
    return rep;
}

BipartiteGraph generate_regular(std::uint32_t n, std::uint32_t delta, std::uint64_t seed) {
    if (n == 0 || delta == 0 || delta > n)
        throw std::invalid_argument("generate_regular: need 1 <= delta <= n");
    if (delta == n) return complete_graph(n);

    // Dense graphs are generated as the complement of a sparse one; matching
    // repair mixes poorly once more than half of each row is occupied.
    if (delta > n / 2) {
        const auto sparse = superpose_matchings(n, n - delta, seed);
        EdgeFilter used(n);
        for (const auto& [v, u] : sparse) used.set(v, u);
        std::vector<BipartiteGraph::Edge> edges;
        edges.reserve(static_cast<std::size_t>(n) * delta);
        for (std::uint32_t v = 0; v < n; ++v)
            for (std::uint32_t u = 0; u < n; ++u)
                if (!used.test(v, u)) edges.emplace_back(v, u);
        return BipartiteGraph::from_edges(n, std::move(edges));
    }

    return BipartiteGraph::from_edges(n, superpose_matchings(n, delta, seed));
}

BipartiteGraph generate_almost_regular(std::uint32_t n, std::uint32_t delta_min_c, double rho,
                                       double heavy_fraction, std::uint64_t seed) {
    if (rho < 1) throw std::invalid_argument("generate_almost_regular: rho must be >= 1");
    if (heavy_fraction < 0 || heavy_fraction > 0.1)
        throw std::invalid_argument("generate_almost_regular: heavy_fraction must be in [0, 0.1]");
    if (n == 0 || delta_min_c == 0 || delta_min_c > n)
        throw std::invalid_argument("generate_almost_regular: need 1 <= delta_min_c <= n");
    if (delta_min_c == n) return complete_graph(n);

    const double cap = rho * static_cast<double>(delta_min_c);
    const auto heavy_degree =
        static_cast<std::uint32_t>(std::min(std::floor(cap), static_cast<double>(n)));
    const auto n_heavy = static_cast<std::uint32_t>(heavy_fraction * n);

    std::vector<std::uint32_t> client_deg(n, delta_min_c);
    for (std::uint32_t v = 0; v < n_heavy; ++v) client_deg[v] = heavy_degree;
    std::uint64_t total = 0;
    for (const auto dgr : client_deg) total += dgr;

    // Servers share the stub mass as evenly as possible.
    const auto base = static_cast<std::uint32_t>(total / n);
    const auto remainder = static_cast<std::uint32_t>(total % n);
    const std::uint32_t server_max = base + (remainder > 0 ? 1 : 0);
    if (server_max > n || static_cast<double>(server_max) > cap)
        throw std::invalid_argument("generate_almost_regular: infeasible degree sequence");

    std::vector<std::uint32_t> client_stubs, server_stubs;
    client_stubs.reserve(total);
    server_stubs.reserve(total);
    for (std::uint32_t v = 0; v < n; ++v)
        client_stubs.insert(client_stubs.end(), client_deg[v], v);
    for (std::uint32_t u = 0; u < n; ++u)
        server_stubs.insert(server_stubs.end(), base + (u < remainder ? 1 : 0), u);

    SplitMix64 gen(substream(seed, kStreamStubs, 0));
    for (std::uint64_t i = total - 1; i > 0; --i) {
        const auto j = gen.bounded(i + 1);
        std::swap(server_stubs[i], server_stubs[j]);
    }

    // Pair stub i of the client list with stub i of the shuffled server list;
    // repair duplicate edges by swapping server-stub positions.
    EdgeFilter used(n);
    std::uint64_t budget = 1000ULL * total;
    for (std::uint64_t i = 0; i < total; ++i) {
        const std::uint32_t ci = client_stubs[i];
        while (used.test(ci, server_stubs[i])) {
            if (budget-- == 0)
                throw std::runtime_error(
                    "generate_almost_regular: stub repair budget exhausted");
            const std::uint64_t j = gen.bounded(total);
            if (j == i) continue;
            const std::uint32_t cj = client_stubs[j];
            if (used.test(ci, server_stubs[j])) continue;
            if (j < i) {
                if (used.test(cj, server_stubs[i])) continue;
                used.clear(cj, server_stubs[j]);
                used.set(cj, server_stubs[i]);
            }
            std::swap(server_stubs[i], server_stubs[j]);
        }
        used.set(ci, server_stubs[i]);
    }

    std::vector<BipartiteGraph::Edge> edges;
    edges.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i)
        edges.emplace_back(client_stubs[i], server_stubs[i]);
    return BipartiteGraph::from_edges(n, std::move(edges));
}

GraphParseError::GraphParseError(const std::string& what, std::uint64_t line_number)
    : std::runtime_error("line " + std::to_string(line_number) + ": " + what),
      line(line_number) {}

void save_graph(const BipartiteGraph& g, std::ostream& out) {
    out << g.size() << ' ' << g.size() << '\n';
    for (std::uint32_t v = 0; v < g.size(); ++v)
        for (const auto u : g.client_neighbors(v)) out << v << ' ' << u << '\n';
}

void save_graph(const BipartiteGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    save_graph(g, out);
    if (!out.flush()) throw std::runtime_error("write failed: " + path);
}

BipartiteGraph load_graph(std::istream& in) {
    std::string line;
    std::uint64_t line_no = 0;
    bool have_header = false;
    std::uint64_t n_clients = 0, n_servers = 0;
    std::vector<BipartiteGraph::Edge> edges;
    std::unordered_set<std::uint64_t> seen;

    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;

        std::istringstream fields(line);
        if (!have_header) {
            if (!(fields >> n_clients >> n_servers))
                throw GraphParseError("malformed header, expected 'n_clients n_servers'", line_no);
            if (n_clients == 0 || n_clients != n_servers)
                throw GraphParseError("sides must be equal and nonzero", line_no);
            if (n_clients > std::numeric_limits<std::uint32_t>::max())
                throw GraphParseError("side size too large", line_no);
            have_header = true;
            continue;
        }
        std::uint64_t v = 0, u = 0;
        if (!(fields >> v >> u))
            throw GraphParseError("malformed edge, expected 'client server'", line_no);
        if (v >= n_clients || u >= n_servers)
            throw GraphParseError("edge index out of range", line_no);
        if (!seen.insert(v << 32 | u).second)
            throw GraphParseError("duplicate edge", line_no);
        edges.emplace_back(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(u));
    }
    if (!have_header) throw GraphParseError("missing header", line_no + 1);
    return BipartiteGraph::from_edges(static_cast<std::uint32_t>(n_clients), std::move(edges));
}

BipartiteGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return load_graph(in);
}

}  // namespace saer
