#include "saer/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "saer/protocol.hpp"

namespace saer {

BipartiteGraph GraphSpec::build() const {
    if (!file.empty()) return load_graph(file);
    if (regular) return generate_regular(regular->n, regular->delta, seed);
    if (almost_regular)
        return generate_almost_regular(almost_regular->n, almost_regular->delta_min_c,
                                       almost_regular->rho, almost_regular->heavy_fraction, seed);
    throw std::invalid_argument("graph spec is empty");
}

std::string GraphSpec::describe() const {
    if (!file.empty()) return "file:" + file;
    if (regular)
        return "regular(n=" + std::to_string(regular->n) +
               ",delta=" + std::to_string(regular->delta) + ",seed=" + std::to_string(seed) + ")";
    if (almost_regular)
        return "almost_regular(n=" + std::to_string(almost_regular->n) +
               ",delta_min_c=" + std::to_string(almost_regular->delta_min_c) +
               ",rho=" + std::to_string(almost_regular->rho) +
               ",heavy_fraction=" + std::to_string(almost_regular->heavy_fraction) +
               ",seed=" + std::to_string(seed) + ")";
    return "unspecified";
}

RunResult run_trial(const BipartiteGraph& g, const ExperimentConfig& config, std::uint64_t seed) {
    std::optional<std::vector<std::uint32_t>> quotas;
    if (config.quotas == QuotaPolicy::Zero)
        quotas.emplace(std::vector<std::uint32_t>(g.size(), 0));
    Simulation sim(g, config.kind, config.c, config.d, seed, config.metrics, std::move(quotas));
    const std::uint64_t horizon =
        config.max_rounds ? config.max_rounds : Simulation::default_max_rounds(g.size());
    return sim.run_to_completion(horizon);
}

TrialSummary summarize_trial(std::uint32_t index, const RunResult& run,
                             const TheoryEnvelope* env) {
    TrialSummary t;
    t.trial = index;
    t.seed = run.params.seed;
    t.completion_round = run.completion_round;
    t.non_terminated = run.non_terminated;
    t.work = run.work;
    t.max_load = run.max_load;
    t.max_s_t = run.max_s_t;
    if (env) {
        for (const auto& rec : run.trajectory) {
            if (!rec.full_metrics) break;
            const std::uint64_t round = rec.round;
            if (round < env->stage1_horizon) {
                if (rec.k_t > env->gamma[round]) t.stage1_violations++;
            } else if (round <= env->completion_bound) {
                if (rec.k_t > env->delta_seq[round]) t.stage2_violations++;
            }
        }
    }
    return t;
}

namespace {

StatLine stats_over(std::vector<double> values) {
    StatLine s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (const auto v : values) sum += v;
    const std::size_t k = values.size();
    s.mean = sum / static_cast<double>(k);
    s.median = (k % 2 == 1) ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
    const std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(k)));
    s.p95 = values[rank - 1];
    s.max = values.back();
    return s;
}

}  // namespace

AggregateSummary aggregate_trials(std::span<const TrialSummary> trials, std::uint64_t n,
                                  std::uint32_t d, bool has_s_stats, bool has_envelope) {
    AggregateSummary agg;
    agg.trials = static_cast<std::uint32_t>(trials.size());
    agg.has_s_stats = has_s_stats;
    agg.has_envelope = has_envelope;

    std::vector<double> completion, work, work_per_ball, load, s_max;
    const double balls = static_cast<double>(n) * d;
    for (const auto& t : trials) {
        if (t.non_terminated) {
            agg.non_termination_count++;
        } else {
            completion.push_back(static_cast<double>(t.completion_round));
            work.push_back(static_cast<double>(t.work));
            if (balls > 0) work_per_ball.push_back(static_cast<double>(t.work) / balls);
            load.push_back(static_cast<double>(t.max_load));
            if (has_s_stats) s_max.push_back(t.max_s_t);
        }
        agg.stage1_violation_rounds += t.stage1_violations;
        agg.stage2_violation_rounds += t.stage2_violations;
        if (t.stage1_violations + t.stage2_violations > 0) agg.trials_with_violations++;
    }
    agg.completed = agg.trials - agg.non_termination_count;
    agg.completion_round = stats_over(std::move(completion));
    agg.work = stats_over(std::move(work));
    agg.work_per_ball = stats_over(std::move(work_per_ball));
    agg.max_load = stats_over(std::move(load));
    agg.max_s_t = stats_over(std::move(s_max));
    return agg;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const BipartiteGraph& g) {
    if (config.trials == 0) throw std::invalid_argument("trials must be at least 1");

    ExperimentResult result;
    result.config = config;
    if (result.config.c == 0)
        result.config.c = recommended_c(config.eta, config.rho, config.d);
    if (result.config.max_rounds == 0)
        result.config.max_rounds = Simulation::default_max_rounds(g.size());
    result.n = g.size();
    result.degrees = degree_report(g);

    TheoryParams tp;
    tp.n = g.size();
    tp.d = result.config.d;
    tp.c = result.config.c;
    tp.eta = config.eta;
    tp.rho = config.rho;
    tp.delta_min_c = result.degrees.delta_min_c;
    tp.delta_max_s = result.degrees.delta_max_s;
    try {
        result.envelope = envelope(tp);
    } catch (const std::invalid_argument&) {
        result.envelope.reset();  // c below the envelope bound; run without one
    }

    const std::uint32_t trials = config.trials;
    std::vector<RunResult> runs(trials);
    unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
    workers = std::max(1u, std::min(workers, trials));

    std::atomic<std::uint32_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::uint32_t i = next.fetch_add(1);
            if (i >= trials) break;
            runs[i] = run_trial(g, result.config, result.config.base_seed + i);
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
        for (auto& th : pool) th.join();
    }

    const bool track_envelope =
        result.envelope.has_value() && result.config.metrics == MetricsLevel::Full;
    result.trials.reserve(trials);
    result.trajectories.reserve(trials);
    for (std::uint32_t i = 0; i < trials; ++i) {
        result.trials.push_back(
            summarize_trial(i, runs[i], track_envelope ? &*result.envelope : nullptr));
        result.trajectories.push_back(std::move(runs[i].trajectory));
    }
    result.aggregate =
        aggregate_trials(result.trials, g.size(), result.config.d,
                         result.config.metrics == MetricsLevel::Full, track_envelope);
    return result;
}

}  // namespace saer
