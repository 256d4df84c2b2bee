#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saer/experiment.hpp"
#include "saer/metrics.hpp"
#include "saer/theory.hpp"

namespace saer {

// Schema tags written as the first comment line of every CSV and as the
// "schema" field of every JSON document.
inline constexpr std::string_view kRoundsSchema = "saersim-rounds-v1";
inline constexpr std::string_view kRunSchema = "saersim-run-v1";
inline constexpr std::string_view kSummarySchema = "saersim-summary-v1";
inline constexpr std::string_view kTheorySchema = "saersim-theory-v1";

std::string_view to_string(ProtocolKind kind) noexcept;
std::string_view to_string(MetricsLevel level) noexcept;
std::string_view to_string(QuotaPolicy policy) noexcept;
ProtocolKind protocol_from_string(std::string_view s);
MetricsLevel metrics_from_string(std::string_view s);
QuotaPolicy quotas_from_string(std::string_view s);

// Per-round CSV. Columns: trial, round, requests_sent, accepted, alive_after,
// burned_servers, S_t, K_t, r_t_max, messages. The three observable columns
// are empty under light metrics.
void write_rounds_csv_header(std::ostream& out);
void write_rounds_csv_rows(std::ostream& out, std::uint32_t trial,
                           std::span<const RoundRecord> trajectory);
void write_run_rounds_csv(std::ostream& out, const RunResult& run);
void write_experiment_rounds_csv(std::ostream& out, const ExperimentResult& result);

std::string run_summary_json(const RunResult& run);
std::string experiment_summary_json(const ExperimentResult& result);

// Theory CSV: columns t, gamma_t, product_t, delta_t where product_t is the
// product of gamma_0..gamma_{t-1}. A non-empty header_comment is emitted as a
// `# header: ...` line between the schema line and the column row.
void write_theory_csv(std::ostream& out, const TheoryEnvelope& env,
                      std::string_view header_comment = {});
std::string theory_json(const TheoryEnvelope& env, const TheoryParams& params);
std::string theory_json_compact(const TheoryEnvelope& env, const TheoryParams& params);

/// One parsed row of the rounds CSV; observable cells may be empty.
struct RoundRow {
    std::uint32_t trial = 0;
    std::uint64_t round = 0;
    std::uint64_t requests_sent = 0;
    std::uint64_t accepted = 0;
    std::uint64_t alive_after = 0;
    std::uint64_t burned_servers = 0;
    std::optional<double> s_t;
    std::optional<double> k_t;
    std::optional<std::uint64_t> r_t_max;
    std::uint64_t messages = 0;
};

/// Parses a rounds CSV, validating the schema line and the column header.
/// Throws std::runtime_error on malformed or missing columns.
std::vector<RoundRow> parse_rounds_csv(std::istream& in);

/// The slice of an experiment summary JSON that `check` consumes.
struct SummaryDoc {
    ProtocolKind kind = ProtocolKind::Saer;
    std::uint32_t n = 0;
    std::uint32_t c = 0;
    std::uint32_t d = 0;
    std::uint32_t trials = 0;
    std::uint64_t base_seed = 0;
    std::uint64_t max_rounds = 0;
    MetricsLevel metrics = MetricsLevel::Full;
    DegreeReport degrees;
    bool has_envelope = false;
    std::uint64_t stage1_horizon = 0;
    std::uint64_t completion_bound = 0;
    std::vector<double> gamma;
    std::vector<double> delta_seq;
    std::vector<TrialSummary> trial_rows;
};

SummaryDoc parse_experiment_summary(const std::string& json_text);

}  // namespace saer
