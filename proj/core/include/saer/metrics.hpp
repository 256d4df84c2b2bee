#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "saer/graph.hpp"

namespace saer {

/// Full tracks every analysis observable (S_t, K_t, r_t(N(v))); Light keeps
/// only counts and work, for large sweeps.
enum class MetricsLevel { Full, Light };

enum class ProtocolKind { Saer, Raes };

/// Everything observed in one executed round.
struct RoundRecord {
    std::uint64_t round = 0;
    std::uint64_t requests_sent = 0;   // sum over servers of r_t(u); equals balls alive at round start
    std::uint64_t accepted = 0;
    std::uint64_t alive_after = 0;
    std::uint64_t burned_servers = 0;
    double s_t = 0.0;                  // max over clients of burned fraction in N(v)
    double k_t = 0.0;                  // max over clients of K_t(v)
    std::uint64_t r_t_max = 0;         // max over clients of r_t(N(v))
    std::uint64_t messages = 0;        // 2 * requests_sent
    bool full_metrics = true;          // false when S_t/K_t/r_t_max were not tracked

    friend bool operator==(const RoundRecord&, const RoundRecord&) = default;
};

struct RunParams {
    ProtocolKind kind = ProtocolKind::Saer;
    std::uint32_t n = 0;
    std::uint32_t c = 0;
    std::uint32_t d = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_rounds = 0;
    MetricsLevel metrics = MetricsLevel::Full;

    friend bool operator==(const RunParams&, const RunParams&) = default;
};

/// Terminal summary of one run.
struct RunResult {
    static constexpr std::int64_t kNonTerminated = -1;

    std::int64_t completion_round = 0;  // kNonTerminated if max_rounds was hit
    bool non_terminated = false;
    std::uint64_t work = 0;             // total messages = 2 * total requests
    std::uint64_t max_load = 0;         // max accepted load over servers
    double max_s_t = 0.0;               // max over rounds of S_t (0 if no rounds ran)
    std::vector<RoundRecord> trajectory;
    RunParams params;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct NeighborhoodSums {
    std::vector<std::uint64_t> per_client;  // r_t(N(v))
    std::uint64_t max = 0;                  // r_t
};

/// Sums per-server request counts over each client's neighborhood.
NeighborhoodSums neighborhood_request_sums(const BipartiteGraph& g,
                                           std::span<const std::uint32_t> per_server_requests);

struct BurnedFractions {
    std::vector<double> per_client;  // S_t(v) = |burned in N(v)| / deg(v)
    double max = 0.0;                // S_t
};

BurnedFractions burned_fraction(const BipartiteGraph& g, std::span<const std::uint8_t> burned);

struct KStatistic {
    std::vector<double> per_client;  // K_t(v) = cumulative r(N(v)) / (c d deg(v))
    double max = 0.0;                // K_t
};

KStatistic k_statistic(const BipartiteGraph& g, std::uint64_t c, std::uint64_t d,
                       std::span<const std::uint64_t> cumulative_neighborhood_sums);

/// Total work of a trajectory: the sum of per-round message counts.
std::uint64_t accumulate_work(std::span<const RoundRecord> trajectory);

/// Incremental per-round observables, updated as the simulation runs.
///
/// Per round the scatter cost is proportional to the degrees of servers that
/// actually received requests (plus the degrees of newly burned servers,
/// once per server over the whole run). In Light mode nothing is tracked.
class RoundObservables {
public:
    RoundObservables(const BipartiteGraph& g, std::uint64_t c, std::uint64_t d,
                     MetricsLevel level);

    void observe_round(std::span<const std::uint32_t> per_server_requests,
                       std::span<const std::uint32_t> newly_burned);

    bool full() const noexcept { return level_ == MetricsLevel::Full; }
    double s_t() const noexcept { return s_t_; }
    double k_t() const noexcept { return k_t_; }
    std::uint64_t r_t_max() const noexcept { return r_t_max_; }

    std::span<const std::uint64_t> cumulative_sums() const noexcept { return cumulative_; }
    std::span<const std::uint64_t> round_sums() const noexcept { return round_; }
    std::span<const std::uint32_t> burned_neighbor_counts() const noexcept { return burned_nb_; }

private:
    const BipartiteGraph* g_;
    std::uint64_t cd_;
    MetricsLevel level_;
    std::vector<std::uint64_t> cumulative_, round_;
    std::vector<std::uint32_t> burned_nb_;
    double s_t_ = 0.0, k_t_ = 0.0;
    std::uint64_t r_t_max_ = 0;
};

}  // namespace saer
