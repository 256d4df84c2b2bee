#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saer/graph.hpp"
#include "saer/metrics.hpp"
#include "saer/theory.hpp"

namespace saer {

struct RegularGraphSpec {
    std::uint32_t n = 0;
    std::uint32_t delta = 0;
};

struct AlmostRegularGraphSpec {
    std::uint32_t n = 0;
    std::uint32_t delta_min_c = 0;
    double rho = 1.0;
    double heavy_fraction = 0.0;
};

/// Where the experiment's graph comes from: a file or one of the generators.
struct GraphSpec {
    std::string file;  // non-empty wins over the generator specs
    std::optional<RegularGraphSpec> regular;
    std::optional<AlmostRegularGraphSpec> almost_regular;
    std::uint64_t seed = 0;

    BipartiteGraph build() const;
    std::string describe() const;
};

enum class QuotaPolicy { Full, Zero };

struct ExperimentConfig {
    GraphSpec graph;
    ProtocolKind kind = ProtocolKind::Saer;
    std::uint32_t c = 0;  // 0 = auto: recommended_c(eta, rho, d)
    double eta = 1.0;
    double rho = 1.0;
    std::uint32_t d = 1;
    QuotaPolicy quotas = QuotaPolicy::Full;
    std::uint32_t trials = 1;
    std::uint64_t base_seed = 0;
    std::uint64_t max_rounds = 0;  // 0 = default_max_rounds(n)
    MetricsLevel metrics = MetricsLevel::Full;
    unsigned workers = 0;  // 0 = hardware concurrency
};

struct TrialSummary {
    std::uint32_t trial = 0;
    std::uint64_t seed = 0;
    std::int64_t completion_round = 0;
    bool non_terminated = false;
    std::uint64_t work = 0;
    std::uint64_t max_load = 0;
    double max_s_t = 0.0;
    std::uint64_t stage1_violations = 0;  // rounds t < T with K_t > gamma_t
    std::uint64_t stage2_violations = 0;  // rounds T <= t <= floor(3 ln n) with K_t > delta_t
};

struct StatLine {
    double mean = 0.0;
    double median = 0.0;
    double p95 = 0.0;  // nearest-rank
    double max = 0.0;
};

/// Statistics over the completed trials of one experiment. Computed from the
/// canonically ordered trial list, so they are independent of the order in
/// which trials finished.
struct AggregateSummary {
    std::uint32_t trials = 0;
    std::uint32_t completed = 0;
    std::uint32_t non_termination_count = 0;
    StatLine completion_round, work, work_per_ball, max_load, max_s_t;
    bool has_s_stats = false;  // false under light metrics
    std::uint64_t stage1_violation_rounds = 0;
    std::uint64_t stage2_violation_rounds = 0;
    std::uint32_t trials_with_violations = 0;
    bool has_envelope = false;
};

struct ExperimentResult {
    ExperimentConfig config;  // with c resolved
    std::uint32_t n = 0;      // graph side size
    DegreeReport degrees;
    std::optional<TheoryEnvelope> envelope;  // absent when c is below the envelope bound
    std::vector<TrialSummary> trials;
    std::vector<std::vector<RoundRecord>> trajectories;
    AggregateSummary aggregate;
};

/// One seeded trial under an experiment config (seed = base_seed + index in
/// the experiment). Shares the read-only graph.
RunResult run_trial(const BipartiteGraph& g, const ExperimentConfig& config, std::uint64_t seed);

TrialSummary summarize_trial(std::uint32_t index, const RunResult& run,
                             const TheoryEnvelope* env);

AggregateSummary aggregate_trials(std::span<const TrialSummary> trials, std::uint64_t n,
                                  std::uint32_t d, bool has_s_stats, bool has_envelope);

/// Runs config.trials independent simulations (possibly on several worker
/// threads), derives seeds as base_seed + trial index, and aggregates.
ExperimentResult run_experiment(const ExperimentConfig& config, const BipartiteGraph& g);

}  // namespace saer
