#include "saer/checks.hpp"

#include <algorithm>
#include <cmath>

namespace saer {

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        default: return "SKIP";
    }
}

CheckInputs inputs_from_result(const ExperimentResult& result) {
    CheckInputs in;
    in.kind = result.config.kind;
    in.n = result.n;
    in.c = result.config.c;
    in.d = result.config.d;
    in.metrics = result.config.metrics;
    in.completion_bound =
        static_cast<std::uint64_t>(std::floor(3.0 * std::log(static_cast<double>(result.n))));
    if (result.envelope) {
        in.has_envelope = true;
        in.stage1_horizon = result.envelope->stage1_horizon;
        in.completion_bound = result.envelope->completion_bound;
        in.gamma = result.envelope->gamma;
        in.delta_seq = result.envelope->delta_seq;
    }
    in.trials = result.trials;
    for (std::uint32_t i = 0; i < result.trajectories.size(); ++i) {
        for (const auto& rec : result.trajectories[i]) {
            RoundRow row;
            row.trial = i;
            row.round = rec.round;
            row.requests_sent = rec.requests_sent;
            row.accepted = rec.accepted;
            row.alive_after = rec.alive_after;
            row.burned_servers = rec.burned_servers;
            if (rec.full_metrics) {
                row.s_t = rec.s_t;
                row.k_t = rec.k_t;
                row.r_t_max = rec.r_t_max;
            }
            row.messages = rec.messages;
            in.rounds.push_back(row);
        }
    }
    return in;
}

CheckInputs inputs_from_files(const SummaryDoc& summary, std::vector<RoundRow> rounds) {
    CheckInputs in;
    in.kind = summary.kind;
    in.n = summary.n;
    in.c = summary.c;
    in.d = summary.d;
    in.metrics = summary.metrics;
    in.has_envelope = summary.has_envelope;
    in.stage1_horizon = summary.stage1_horizon;
    in.completion_bound = summary.completion_bound;
    in.gamma = summary.gamma;
    in.delta_seq = summary.delta_seq;
    in.trials = summary.trial_rows;
    in.rounds = std::move(rounds);
    return in;
}

namespace {

constexpr double kMinFraction = 0.99;

std::string fraction_detail(std::uint64_t good, std::uint64_t total) {
    return std::to_string(good) + "/" + std::to_string(total);
}

}  // namespace

CriterionResult check_safety(const CheckInputs& in) {
    const std::uint64_t cap = static_cast<std::uint64_t>(in.c) * in.d;
    std::uint64_t worst = 0;
    std::uint64_t bad = 0;
    for (const auto& t : in.trials) {
        worst = std::max(worst, t.max_load);
        if (t.max_load > cap) bad++;
    }
    CriterionResult r{"safety", bad == 0 ? Verdict::Pass : Verdict::Fail,
                      "max load " + std::to_string(worst) + " vs cap " + std::to_string(cap) +
                          " (" + std::to_string(bad) + " violating trials)"};
    return r;
}

CriterionResult check_completion(const CheckInputs& in) {
    std::uint64_t within_bound = 0;
    std::uint64_t non_terminated = 0;
    for (const auto& t : in.trials) {
        if (t.non_terminated) {
            non_terminated++;
        } else if (t.completion_round >= 0 &&
                   static_cast<std::uint64_t>(t.completion_round) <= in.completion_bound) {
            within_bound++;
        }
    }
    const auto total = static_cast<std::uint64_t>(in.trials.size());
    const bool ok = non_terminated == 0 &&
                    static_cast<double>(within_bound) >= kMinFraction * static_cast<double>(total);
    CriterionResult r{"completion_bound", ok ? Verdict::Pass : Verdict::Fail,
                      fraction_detail(within_bound, total) + " within floor(3 ln n) = " +
                          std::to_string(in.completion_bound) + ", " +
                          std::to_string(non_terminated) + " non-terminated"};
    return r;
}

CriterionResult check_burned_fraction(const CheckInputs& in) {
    if (in.kind != ProtocolKind::Saer)
        return {"burned_fraction", Verdict::Skipped, "only meaningful for SAER"};
    if (in.metrics != MetricsLevel::Full)
        return {"burned_fraction", Verdict::Skipped, "needs full metrics"};
    std::uint64_t good = 0;
    for (const auto& t : in.trials)
        if (t.max_s_t <= 0.5) good++;
    const auto total = static_cast<std::uint64_t>(in.trials.size());
    const bool ok = static_cast<double>(good) >= kMinFraction * static_cast<double>(total);
    return {"burned_fraction", ok ? Verdict::Pass : Verdict::Fail,
            fraction_detail(good, total) + " trials with max_t S_t <= 0.5"};
}

CriterionResult check_envelope_tracking(const CheckInputs& in) {
    if (in.kind != ProtocolKind::Saer)
        return {"envelope_tracking", Verdict::Skipped, "only meaningful for SAER"};
    if (in.metrics != MetricsLevel::Full)
        return {"envelope_tracking", Verdict::Skipped, "needs full metrics"};
    if (!in.has_envelope)
        return {"envelope_tracking", Verdict::Skipped, "no envelope (c below 8 * ratio)"};

    // Re-derive violations from the per-round K_t column.
    std::vector<std::uint64_t> violations(in.trials.size(), 0);
    for (const auto& row : in.rounds) {
        if (!row.k_t) continue;
        if (row.trial >= violations.size()) continue;
        const std::uint64_t t = row.round;
        if (t < in.stage1_horizon) {
            if (t < in.gamma.size() && *row.k_t > in.gamma[t]) violations[row.trial]++;
        } else if (t <= in.completion_bound) {
            if (t < in.delta_seq.size() && *row.k_t > in.delta_seq[t]) violations[row.trial]++;
        }
    }
    std::uint64_t clean = 0;
    for (const auto v : violations)
        if (v == 0) clean++;
    const auto total = static_cast<std::uint64_t>(in.trials.size());
    const bool ok = static_cast<double>(clean) >= kMinFraction * static_cast<double>(total);
    return {"envelope_tracking", ok ? Verdict::Pass : Verdict::Fail,
            fraction_detail(clean, total) + " trials inside gamma/delta envelopes (T = " +
                std::to_string(in.stage1_horizon) + ")"};
}

CriterionResult check_alive_decay(const CheckInputs& in) {
    if (in.rounds.empty())
        return {"alive_decay", Verdict::Skipped, "no per-round rows"};
    // Qualifying rounds start with at least n*d / ln n alive balls
    // (requests_sent equals the alive count at the round's start).
    const double floor_alive =
        static_cast<double>(in.n) * in.d / std::log(static_cast<double>(in.n));
    std::uint64_t qualifying = 0, good = 0;
    for (const auto& row : in.rounds) {
        if (static_cast<double>(row.requests_sent) < floor_alive) continue;
        qualifying++;
        if (5 * row.alive_after <= 4 * row.requests_sent) good++;
    }
    if (qualifying == 0)
        return {"alive_decay", Verdict::Skipped, "no qualifying (trial, round) pairs"};
    const bool ok = static_cast<double>(good) >= kMinFraction * static_cast<double>(qualifying);
    return {"alive_decay", ok ? Verdict::Pass : Verdict::Fail,
            fraction_detail(good, qualifying) + " qualifying rounds shed at least 1/5"};
}

std::vector<CriterionResult> evaluate_criteria(const CheckInputs& in) {
    return {check_safety(in), check_completion(in), check_burned_fraction(in),
            check_envelope_tracking(in), check_alive_decay(in)};
}

bool any_failed(const std::vector<CriterionResult>& results) noexcept {
    return std::any_of(results.begin(), results.end(),
                       [](const auto& r) { return r.verdict == Verdict::Fail; });
}

}  // namespace saer
