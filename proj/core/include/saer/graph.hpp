#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace saer {

/// Client-server bipartite graph with the same number of nodes on both sides.
///
/// Adjacency is stored in CSR form in both directions, with neighbor lists
/// sorted ascending and duplicate-free. Instances are immutable after
/// construction and safe to share read-only across concurrent trials.
class BipartiteGraph {
public:
    using Edge = std::pair<std::uint32_t, std::uint32_t>;  // (client, server)

    /// Builds a graph from an edge list. Validates that indices are in range,
    /// no edge repeats, and every client has degree >= 1.
    static BipartiteGraph from_edges(std::uint32_t n, std::vector<Edge> edges);

    std::uint32_t size() const noexcept { return n_; }  // clients == servers == n
    std::uint64_t edge_count() const noexcept { return client_adj_.size(); }

    std::span<const std::uint32_t> client_neighbors(std::uint32_t v) const noexcept {
        return {client_adj_.data() + client_off_[v], client_adj_.data() + client_off_[v + 1]};
    }
    std::span<const std::uint32_t> server_neighbors(std::uint32_t u) const noexcept {
        return {server_adj_.data() + server_off_[u], server_adj_.data() + server_off_[u + 1]};
    }
    std::uint32_t client_degree(std::uint32_t v) const noexcept {
        return static_cast<std::uint32_t>(client_off_[v + 1] - client_off_[v]);
    }
    std::uint32_t server_degree(std::uint32_t u) const noexcept {
        return static_cast<std::uint32_t>(server_off_[u + 1] - server_off_[u]);
    }

    /// Edge list sorted by (client, server); the canonical serialization order.
    std::vector<Edge> edges() const;

    friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

private:
    BipartiteGraph() = default;

    std::uint32_t n_ = 0;
    std::vector<std::uint64_t> client_off_, server_off_;
    std::vector<std::uint32_t> client_adj_, server_adj_;
};

struct DegreeReport {
    std::uint32_t delta_min_c = 0;
    std::uint32_t delta_max_c = 0;
    std::uint32_t delta_min_s = 0;
    std::uint32_t delta_max_s = 0;
    double ratio = 0.0;  // delta_max_s / delta_min_c

    friend bool operator==(const DegreeReport&, const DegreeReport&) = default;
};

DegreeReport degree_report(const BipartiteGraph& g);

/// Pass/fail report for the degree hypotheses the completion-time guarantee
/// needs: (a) min client degree >= eta * (ln n)^2, (b) max server degree over
/// min client degree <= rho. Failures are report entries, never errors.
struct PreconditionReport {
    DegreeReport degrees;
    double eta = 0.0;
    double rho = 0.0;
    double min_degree_required = 0.0;  // eta * (ln n)^2
    bool degree_ok = false;
    bool ratio_ok = false;

    bool pass() const noexcept { return degree_ok && ratio_ok; }
};

PreconditionReport check_theorem_preconditions(const BipartiteGraph& g, double eta, double rho);

/// Generates a delta-regular bipartite graph by superposing delta random
/// perfect matchings; parallel edges are repaired by swapping matching
/// entries. Deterministic for a given seed. Throws std::invalid_argument for
/// infeasible parameters and std::runtime_error if the repair budget runs out.
BipartiteGraph generate_regular(std::uint32_t n, std::uint32_t delta, std::uint64_t seed);

/// Generates an almost-regular graph: every client has degree at least
/// delta_min_c, a heavy_fraction of clients is raised to floor(rho *
/// delta_min_c), and server degrees are balanced so the max server degree
/// stays within rho * delta_min_c. Realized by random stub pairing with swap
/// repair of parallel edges.
BipartiteGraph generate_almost_regular(std::uint32_t n, std::uint32_t delta_min_c, double rho,
                                       double heavy_fraction, std::uint64_t seed);

/// Parse failure with the 1-based line number of the offending input line.
struct GraphParseError : std::runtime_error {
    GraphParseError(const std::string& what, std::uint64_t line_number);
    std::uint64_t line = 0;
};

// Text edge-list format: first content line is "n_clients n_servers", every
// following non-empty line one "client server" pair (0-based). Lines starting
// with '#' are comments. Edges must be unique; save writes them sorted.
void save_graph(const BipartiteGraph& g, std::ostream& out);
void save_graph(const BipartiteGraph& g, const std::string& path);
BipartiteGraph load_graph(std::istream& in);
BipartiteGraph load_graph(const std::string& path);

}  // namespace saer
