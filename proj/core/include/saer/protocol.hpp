#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "saer/graph.hpp"
#include "saer/metrics.hpp"

namespace saer {

struct ClientState {
    std::uint32_t accepted_count = 0;  // balls placed so far
    std::uint32_t request_quota = 0;   // this client's ball budget (<= global d)
};

struct ServerState {
    std::uint64_t accepted_load = 0;       // never exceeds c*d
    std::uint64_t cumulative_received = 0; // all requests ever received
    bool burned = false;                   // SAER only; monotone over rounds
};

struct Request {
    std::uint32_t client = 0;
    std::uint32_t server = 0;
    std::uint32_t slot = 0;  // index among the client's alive balls this round

    friend bool operator==(const Request&, const Request&) = default;
};

/// Phase-1 output: one request per alive ball, in ascending (client, slot)
/// order, plus per-server receipt counts r_t(u).
struct RequestBatch {
    std::vector<Request> requests;
    std::vector<std::uint32_t> per_server_requests;

    std::uint64_t total() const noexcept { return requests.size(); }
};

/// Phase-2 outcome. A server either accepts its whole batch or rejects it.
struct Phase2Summary {
    std::vector<std::uint8_t> server_accepted;  // only meaningful where r_t(u) > 0
    std::vector<std::uint32_t> newly_burned;
    std::uint64_t accepted_balls = 0;
};

/// One seeded run of SAER or RAES on a bipartite graph, executed one
/// synchronous round at a time.
///
/// Each round has two phases. Phase 1: every client with k alive balls draws
/// k servers uniformly at random (with replacement) from its neighborhood and
/// submits one request to each. Phase 2: a SAER server that has received more
/// than c*d requests since the start rejects the round's batch and is burned
/// for good; a RAES server rejects a batch only when accepting it would push
/// its accepted load past c*d, and stays eligible afterwards. Accepted
/// batches are credited to the owning clients.
///
/// Request draws come from a substream keyed by (seed, round, client), so a
/// run is bit-for-bit reproducible and independent of iteration order. The
/// graph is borrowed and must outlive the simulation.
class Simulation {
public:
    Simulation(const BipartiteGraph& g, ProtocolKind kind, std::uint32_t c, std::uint32_t d,
               std::uint64_t seed, MetricsLevel metrics = MetricsLevel::Full,
               std::optional<std::vector<std::uint32_t>> quotas = std::nullopt);

    /// Draws the requests for the upcoming round without touching any state.
    RequestBatch phase1() const;

    /// Applies one batch of requests: per-server accept/reject decisions plus
    /// client bookkeeping, and advances the round counter. Exposed separately
    /// so decision traces can be driven with hand-built batches.
    Phase2Summary phase2(const RequestBatch& batch);

    /// Executes one full round and returns its record.
    RoundRecord step();

    /// Steps until every ball is placed or max_rounds is reached. Hitting
    /// max_rounds yields a non-terminated result, not an error.
    RunResult run_to_completion(std::uint64_t max_rounds);

    bool complete() const noexcept { return alive_ == 0; }
    std::uint64_t round() const noexcept { return round_; }
    std::uint64_t alive_balls() const noexcept { return alive_; }
    std::uint64_t burned_count() const noexcept { return burned_count_; }
    std::uint64_t max_load() const noexcept;
    std::uint64_t total_requests_sent() const noexcept { return total_requests_; }

    std::span<const ClientState> clients() const noexcept { return clients_; }
    std::span<const ServerState> servers() const noexcept { return servers_; }
    const BipartiteGraph& graph() const noexcept { return *g_; }
    ProtocolKind kind() const noexcept { return kind_; }
    std::uint32_t c() const noexcept { return c_; }
    std::uint32_t d() const noexcept { return d_; }
    std::uint64_t seed() const noexcept { return seed_; }
    RunParams params(std::uint64_t max_rounds) const;

    /// Default horizon: ceil(10 ln n) + 10, an order of magnitude past the
    /// expected logarithmic completion time.
    static std::uint64_t default_max_rounds(std::uint32_t n);

private:
    RequestBatch draw_requests(std::uint64_t round_index) const;

    const BipartiteGraph* g_;
    ProtocolKind kind_;
    std::uint32_t c_, d_;
    std::uint64_t seed_;
    MetricsLevel metrics_;
    std::uint64_t round_ = 0;
    std::uint64_t alive_ = 0;
    std::uint64_t total_requests_ = 0;
    std::uint64_t burned_count_ = 0;
    std::vector<ClientState> clients_;
    std::vector<ServerState> servers_;
    RoundObservables observables_;
};

}  // namespace saer
