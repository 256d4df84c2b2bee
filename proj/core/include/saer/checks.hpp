#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "saer/experiment.hpp"
#include "saer/report.hpp"

namespace saer {

enum class Verdict { Pass, Fail, Skipped };

std::string_view to_string(Verdict v) noexcept;

struct CriterionResult {
    std::string id;
    Verdict verdict = Verdict::Skipped;
    std::string detail;
};

/// Everything the single-experiment criteria need, whether sourced from an
/// in-memory ExperimentResult or from a summary JSON + rounds CSV pair.
struct CheckInputs {
    ProtocolKind kind = ProtocolKind::Saer;
    std::uint32_t n = 0;
    std::uint32_t c = 0;
    std::uint32_t d = 0;
    MetricsLevel metrics = MetricsLevel::Full;
    bool has_envelope = false;
    std::uint64_t stage1_horizon = 0;
    std::uint64_t completion_bound = 0;  // floor(3 ln n)
    std::vector<double> gamma;
    std::vector<double> delta_seq;
    std::vector<TrialSummary> trials;
    std::vector<RoundRow> rounds;
};

CheckInputs inputs_from_result(const ExperimentResult& result);
CheckInputs inputs_from_files(const SummaryDoc& summary, std::vector<RoundRow> rounds);

// The per-experiment criteria. Statistical thresholds are fixed: a pass needs
// at least a 0.99 fraction of trials (or of qualifying rounds, for decay).
CriterionResult check_safety(const CheckInputs& in);            // max_load <= c*d, every trial
CriterionResult check_completion(const CheckInputs& in);        // >=99% within floor(3 ln n), all terminate
CriterionResult check_burned_fraction(const CheckInputs& in);   // >=99% of trials: max_t S_t <= 1/2
CriterionResult check_envelope_tracking(const CheckInputs& in); // >=99% of trials: K_t within gamma/delta
CriterionResult check_alive_decay(const CheckInputs& in);       // >=99% of qualifying rounds shed 1/5

std::vector<CriterionResult> evaluate_criteria(const CheckInputs& in);

bool any_failed(const std::vector<CriterionResult>& results) noexcept;

}  // namespace saer
