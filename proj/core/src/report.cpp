#include "saer/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace saer {

using nlohmann::json;

std::string_view to_string(ProtocolKind kind) noexcept {
    return kind == ProtocolKind::Saer ? "saer" : "raes";
}

std::string_view to_string(MetricsLevel level) noexcept {
    return level == MetricsLevel::Full ? "full" : "light";
}

std::string_view to_string(QuotaPolicy policy) noexcept {
    return policy == QuotaPolicy::Full ? "full" : "zero";
}

ProtocolKind protocol_from_string(std::string_view s) {
    if (s == "saer") return ProtocolKind::Saer;
    if (s == "raes") return ProtocolKind::Raes;
    throw std::runtime_error("unknown protocol: " + std::string(s));
}

MetricsLevel metrics_from_string(std::string_view s) {
    if (s == "full") return MetricsLevel::Full;
    if (s == "light") return MetricsLevel::Light;
    throw std::runtime_error("unknown metrics level: " + std::string(s));
}

QuotaPolicy quotas_from_string(std::string_view s) {
    if (s == "full") return QuotaPolicy::Full;
    if (s == "zero") return QuotaPolicy::Zero;
    throw std::runtime_error("unknown quota policy: " + std::string(s));
}

namespace {

// Shortest round-trip representation; keeps CSV output byte-deterministic.
void append_double(std::string& buf, double value) {
    char tmp[32];
    const auto res = std::to_chars(tmp, tmp + sizeof tmp, value);
    buf.append(tmp, res.ptr);
}

}  // namespace

void write_rounds_csv_header(std::ostream& out) {
    out << "# schema: " << kRoundsSchema << '\n'
        << "trial,round,requests_sent,accepted,alive_after,burned_servers,"
           "S_t,K_t,r_t_max,messages\n";
}

void write_rounds_csv_rows(std::ostream& out, std::uint32_t trial,
                           std::span<const RoundRecord> trajectory) {
    std::string line;
    for (const auto& rec : trajectory) {
        line.clear();
        line += std::to_string(trial);
        line += ',';
        line += std::to_string(rec.round);
        line += ',';
        line += std::to_string(rec.requests_sent);
        line += ',';
        line += std::to_string(rec.accepted);
        line += ',';
        line += std::to_string(rec.alive_after);
        line += ',';
        line += std::to_string(rec.burned_servers);
        line += ',';
        if (rec.full_metrics) {
            append_double(line, rec.s_t);
            line += ',';
            append_double(line, rec.k_t);
            line += ',';
            line += std::to_string(rec.r_t_max);
        } else {
            line += ",,";
        }
        line += ',';
        line += std::to_string(rec.messages);
        line += '\n';
        out << line;
    }
}

void write_run_rounds_csv(std::ostream& out, const RunResult& run) {
    write_rounds_csv_header(out);
    write_rounds_csv_rows(out, 0, run.trajectory);
}

void write_experiment_rounds_csv(std::ostream& out, const ExperimentResult& result) {
    write_rounds_csv_header(out);
    for (std::uint32_t i = 0; i < result.trajectories.size(); ++i)
        write_rounds_csv_rows(out, i, result.trajectories[i]);
}

namespace {

json params_json(const RunParams& p) {
    return json{{"protocol", to_string(p.kind)}, {"n", p.n},       {"c", p.c},
                {"d", p.d},                      {"seed", p.seed}, {"max_rounds", p.max_rounds},
                {"metrics", to_string(p.metrics)}};
}

json stat_json(const StatLine& s, bool present) {
    if (!present) return nullptr;
    return json{{"mean", s.mean}, {"median", s.median}, {"p95", s.p95}, {"max", s.max}};
}

json envelope_json(const TheoryEnvelope& env) {
    return json{{"alpha", env.alpha},
                {"stage1_horizon", env.stage1_horizon},
                {"stage1_cap", env.stage1_cap},
                {"completion_bound", env.completion_bound},
                {"recommended_c", env.recommended_c},
                {"gamma", env.gamma},
                {"delta", env.delta_seq}};
}

json degrees_json(const DegreeReport& d) {
    return json{{"delta_min_c", d.delta_min_c},
                {"delta_max_c", d.delta_max_c},
                {"delta_min_s", d.delta_min_s},
                {"delta_max_s", d.delta_max_s},
                {"ratio", d.ratio}};
}

json trial_json(const TrialSummary& t) {
    return json{{"trial", t.trial},
                {"seed", t.seed},
                {"completion_round", t.completion_round},
                {"non_terminated", t.non_terminated},
                {"work", t.work},
                {"max_load", t.max_load},
                {"max_s_t", t.max_s_t},
                {"stage1_violations", t.stage1_violations},
                {"stage2_violations", t.stage2_violations}};
}

}  // namespace

std::string run_summary_json(const RunResult& run) {
    json doc{{"schema", kRunSchema},
             {"params", params_json(run.params)},
             {"completion_round", run.completion_round},
             {"non_terminated", run.non_terminated},
             {"work", run.work},
             {"max_load", run.max_load},
             {"max_s_t", run.params.metrics == MetricsLevel::Full ? json(run.max_s_t) : json()},
             {"rounds", run.trajectory.size()}};
    return doc.dump(2) + "\n";
}

std::string experiment_summary_json(const ExperimentResult& result) {
    const auto& cfg = result.config;
    const auto& agg = result.aggregate;
    json doc;
    doc["schema"] = kSummarySchema;
    doc["params"] = {{"protocol", to_string(cfg.kind)},
                     {"n", result.n},
                     {"c", cfg.c},
                     {"d", cfg.d},
                     {"eta", cfg.eta},
                     {"rho", cfg.rho},
                     {"quotas", to_string(cfg.quotas)},
                     {"trials", cfg.trials},
                     {"base_seed", cfg.base_seed},
                     {"max_rounds", cfg.max_rounds},
                     {"metrics", to_string(cfg.metrics)},
                     {"graph", {{"source", cfg.graph.describe()},
                                {"degree_report", degrees_json(result.degrees)}}}};
    doc["envelope"] = result.envelope ? envelope_json(*result.envelope) : json(nullptr);
    doc["aggregate"] = {
        {"trials", agg.trials},
        {"completed", agg.completed},
        {"non_termination_count", agg.non_termination_count},
        {"completion_round", stat_json(agg.completion_round, agg.completed > 0)},
        {"work", stat_json(agg.work, agg.completed > 0)},
        {"work_per_ball", stat_json(agg.work_per_ball, agg.completed > 0)},
        {"max_load", stat_json(agg.max_load, agg.completed > 0)},
        {"max_s_t", stat_json(agg.max_s_t, agg.completed > 0 && agg.has_s_stats)},
        {"stage1_violation_rounds", agg.stage1_violation_rounds},
        {"stage2_violation_rounds", agg.stage2_violation_rounds},
        {"trials_with_envelope_violations", agg.trials_with_violations},
        {"envelope_tracked", agg.has_envelope}};
    json trials = json::array();
    for (const auto& t : result.trials) trials.push_back(trial_json(t));
    doc["trials"] = std::move(trials);
    return doc.dump(2) + "\n";
}

void write_theory_csv(std::ostream& out, const TheoryEnvelope& env,
                      std::string_view header_comment) {
    out << "# schema: " << kTheorySchema << '\n';
    if (!header_comment.empty()) out << "# header: " << header_comment << '\n';
    out << "t,gamma_t,product_t,delta_t\n";
    std::string line;
    for (std::size_t t = 0; t < env.gamma.size(); ++t) {
        line.clear();
        line += std::to_string(t);
        line += ',';
        append_double(line, env.gamma[t]);
        line += ',';
        append_double(line, env.products[t]);
        line += ',';
        if (t < env.delta_seq.size()) append_double(line, env.delta_seq[t]);
        line += '\n';
        out << line;
    }
}

namespace {

json theory_doc(const TheoryEnvelope& env, const TheoryParams& params);

}  // namespace

std::string theory_json(const TheoryEnvelope& env, const TheoryParams& params) {
    return theory_doc(env, params).dump(2) + "\n";
}

std::string theory_json_compact(const TheoryEnvelope& env, const TheoryParams& params) {
    return theory_doc(env, params).dump();
}

namespace {

json theory_doc(const TheoryEnvelope& env, const TheoryParams& params) {
    json doc{{"schema", kTheorySchema},
             {"n", params.n},
             {"d", params.d},
             {"c", params.c},
             {"eta", params.eta},
             {"rho", params.rho},
             {"delta_min_c", params.delta_min_c},
             {"delta_max_s", params.delta_max_s},
             {"alpha", env.alpha},
             {"T", env.stage1_horizon},
             {"stage1_cap", env.stage1_cap},
             {"completion_bound", env.completion_bound},
             {"recommended_c", env.recommended_c}};
    return doc;
}

}  // namespace

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

template <typename T>
T parse_int_cell(const std::string& cell, std::uint64_t line_no) {
    T value{};
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("rounds CSV line " + std::to_string(line_no) +
                                 ": bad integer cell '" + cell + "'");
    return value;
}

double parse_double_cell(const std::string& cell, std::uint64_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("rounds CSV line " + std::to_string(line_no) +
                                 ": bad numeric cell '" + cell + "'");
    }
}

}  // namespace

std::vector<RoundRow> parse_rounds_csv(std::istream& in) {
    std::string line;
    std::uint64_t line_no = 0;
    bool header_seen = false;
    std::vector<RoundRow> rows;

    const std::string expected_header =
        "trial,round,requests_sent,accepted,alive_after,burned_servers,S_t,K_t,r_t_max,messages";

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != expected_header)
                throw std::runtime_error("rounds CSV: unexpected column header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != 10)
            throw std::runtime_error("rounds CSV line " + std::to_string(line_no) +
                                     ": expected 10 columns, got " + std::to_string(cells.size()));
        RoundRow r;
        r.trial = parse_int_cell<std::uint32_t>(cells[0], line_no);
        r.round = parse_int_cell<std::uint64_t>(cells[1], line_no);
        r.requests_sent = parse_int_cell<std::uint64_t>(cells[2], line_no);
        r.accepted = parse_int_cell<std::uint64_t>(cells[3], line_no);
        r.alive_after = parse_int_cell<std::uint64_t>(cells[4], line_no);
        r.burned_servers = parse_int_cell<std::uint64_t>(cells[5], line_no);
        if (!cells[6].empty()) r.s_t = parse_double_cell(cells[6], line_no);
        if (!cells[7].empty()) r.k_t = parse_double_cell(cells[7], line_no);
        if (!cells[8].empty()) r.r_t_max = parse_int_cell<std::uint64_t>(cells[8], line_no);
        r.messages = parse_int_cell<std::uint64_t>(cells[9], line_no);
        rows.push_back(r);
    }
    if (!header_seen) throw std::runtime_error("rounds CSV: missing column header");
    return rows;
}

SummaryDoc parse_experiment_summary(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("summary JSON: parse error: ") + e.what());
    }
    try {
        if (doc.at("schema").get<std::string>() != kSummarySchema)
            throw std::runtime_error("summary JSON: unexpected schema '" +
                                     doc["schema"].get<std::string>() + "'");
        SummaryDoc s;
        const auto& params = doc.at("params");
        s.kind = protocol_from_string(params.at("protocol").get<std::string>());
        s.n = params.at("n").get<std::uint32_t>();
        s.c = params.at("c").get<std::uint32_t>();
        s.d = params.at("d").get<std::uint32_t>();
        s.trials = params.at("trials").get<std::uint32_t>();
        s.base_seed = params.at("base_seed").get<std::uint64_t>();
        s.max_rounds = params.at("max_rounds").get<std::uint64_t>();
        s.metrics = metrics_from_string(params.at("metrics").get<std::string>());
        const auto& deg = params.at("graph").at("degree_report");
        s.degrees.delta_min_c = deg.at("delta_min_c").get<std::uint32_t>();
        s.degrees.delta_max_c = deg.at("delta_max_c").get<std::uint32_t>();
        s.degrees.delta_min_s = deg.at("delta_min_s").get<std::uint32_t>();
        s.degrees.delta_max_s = deg.at("delta_max_s").get<std::uint32_t>();
        s.degrees.ratio = deg.at("ratio").get<double>();
        if (!doc.at("envelope").is_null()) {
            const auto& env = doc["envelope"];
            s.has_envelope = true;
            s.stage1_horizon = env.at("stage1_horizon").get<std::uint64_t>();
            s.completion_bound = env.at("completion_bound").get<std::uint64_t>();
            s.gamma = env.at("gamma").get<std::vector<double>>();
            s.delta_seq = env.at("delta").get<std::vector<double>>();
        } else {
            s.completion_bound = static_cast<std::uint64_t>(
                std::floor(3.0 * std::log(static_cast<double>(s.n))));
        }
        for (const auto& t : doc.at("trials")) {
            TrialSummary row;
            row.trial = t.at("trial").get<std::uint32_t>();
            row.seed = t.at("seed").get<std::uint64_t>();
            row.completion_round = t.at("completion_round").get<std::int64_t>();
            row.non_terminated = t.at("non_terminated").get<bool>();
            row.work = t.at("work").get<std::uint64_t>();
            row.max_load = t.at("max_load").get<std::uint64_t>();
            row.max_s_t = t.at("max_s_t").get<double>();
            row.stage1_violations = t.at("stage1_violations").get<std::uint64_t>();
            row.stage2_violations = t.at("stage2_violations").get<std::uint64_t>();
            s.trial_rows.push_back(row);
        }
        return s;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("summary JSON: missing or bad field: ") + e.what());
    }
}

}  // namespace saer
