// saersim: generate client-server bipartite graphs, run seeded SAER/RAES
// simulations, sweep multi-trial experiments, evaluate analytic envelopes,
// and check experiment outputs against the built-in criteria.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "saer/checks.hpp"
#include "saer/experiment.hpp"
#include "saer/graph.hpp"
#include "saer/protocol.hpp"
#include "saer/report.hpp"
#include "saer/theory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace saer;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitNonTermination = 4;
constexpr int kExitCheckFailed = 5;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Relative output paths land under $SAERSIM_OUT_DIR when it is set.
fs::path resolve_output(const std::string& path) {
    fs::path p(path);
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("SAERSIM_OUT_DIR")) return fs::path(dir) / p;
    return p;
}

void write_text(const std::string& path_or_dash,
                const std::function<void(std::ostream&)>& body) {
    if (path_or_dash == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    const auto path = resolve_output(path_or_dash);
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    body(out);
    if (!out.flush()) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

BipartiteGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    return load_graph(in);  // GraphParseError on malformed content
}

std::uint32_t parse_c_option(const std::string& text) {
    if (text == "auto") return 0;
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(text, &used);
        if (used != text.size() || v == 0) throw std::invalid_argument(text);
        return static_cast<std::uint32_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("--c expects a positive integer or 'auto', got '" + text + "'");
    }
}

// Graph-source flags shared by run/experiment (generate uses its own subset).
struct GraphCli {
    std::string file;
    bool regular = false;
    bool almost_regular = false;
    std::uint32_t n = 0;
    std::uint32_t delta = 0;
    std::uint32_t delta_min_c = 0;
    double heavy_fraction = 0.0;
    std::uint64_t seed = 0;
    CLI::Option* opt_seed = nullptr;

    void add_options(CLI::App* cmd, bool with_file) {
        if (with_file)
            cmd->add_option("--graph", file, "Load the graph from an edge-list file");
        cmd->add_flag("--regular", regular, "Generate a delta-regular graph");
        cmd->add_flag("--almost-regular", almost_regular, "Generate an almost-regular graph");
        cmd->add_option("--n", n, "Number of clients (= number of servers)");
        cmd->add_option("--delta", delta, "Degree of the regular graph");
        cmd->add_option("--delta-min-c", delta_min_c, "Minimum client degree");
        cmd->add_option("--heavy-fraction", heavy_fraction,
                        "Fraction of clients raised to rho * delta_min_c (max 0.1)");
        opt_seed = cmd->add_option("--graph-seed", seed, "Seed for the graph generator");
    }

    bool any_set() const { return !file.empty() || regular || almost_regular; }

    void apply_to(GraphSpec& spec, double rho) const {
        if (static_cast<int>(!file.empty()) + static_cast<int>(regular) +
                static_cast<int>(almost_regular) >
            1)
            throw ConfigError("choose one of --graph, --regular, --almost-regular");
        if (!file.empty()) {
            spec = GraphSpec{};
            spec.file = file;
            return;
        }
        if (regular) {
            if (n == 0 || delta == 0) throw ConfigError("--regular needs --n and --delta >= 1");
            spec = GraphSpec{};
            spec.regular = RegularGraphSpec{n, delta};
            spec.seed = seed;
            return;
        }
        if (almost_regular) {
            if (n == 0 || delta_min_c == 0)
                throw ConfigError("--almost-regular needs --n and --delta-min-c >= 1");
            spec = GraphSpec{};
            spec.almost_regular = AlmostRegularGraphSpec{n, delta_min_c, rho, heavy_fraction};
            spec.seed = seed;
            return;
        }
        if (spec.file.empty() && !spec.regular && !spec.almost_regular)
            throw ConfigError("no graph source given (use --graph/--regular/--almost-regular)");
    }
};

json precondition_json(const PreconditionReport& rep) {
    return json{{"eta", rep.eta},
                {"rho", rep.rho},
                {"min_degree_required", rep.min_degree_required},
                {"degree_ok", rep.degree_ok},
                {"ratio_ok", rep.ratio_ok},
                {"pass", rep.pass()}};
}

json degree_json(const DegreeReport& rep) {
    return json{{"delta_min_c", rep.delta_min_c},
                {"delta_max_c", rep.delta_max_c},
                {"delta_min_s", rep.delta_min_s},
                {"delta_max_s", rep.delta_max_s},
                {"ratio", rep.ratio}};
}

// ----------------------------------------------------------------- generate

struct GenerateArgs {
    GraphCli graph;
    std::string out;
    double eta = 1.0;
    double rho = 1.0;
};

int cmd_generate(const GenerateArgs& args) {
    GraphSpec spec;
    args.graph.apply_to(spec, args.rho);
    const auto g = spec.build();

    write_text(args.out, [&](std::ostream& out) { save_graph(g, out); });

    const auto pre = check_theorem_preconditions(g, args.eta, args.rho);
    json report{{"graph", spec.describe()},
                {"out", args.out},
                {"n", g.size()},
                {"edges", g.edge_count()},
                {"degree_report", degree_json(pre.degrees)},
                {"preconditions", precondition_json(pre)}};
    std::cout << report.dump(2) << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------- run

struct RunArgs {
    GraphCli graph;
    std::string protocol = "saer";
    std::string c_text = "auto";
    double eta = 1.0;
    double rho = 1.0;
    std::uint32_t d = 1;
    std::string quotas = "full";
    std::uint64_t seed = 0;
    std::uint64_t max_rounds = 0;
    std::string metrics = "full";
    std::string csv;
    std::string json_path;
};

int cmd_run(const RunArgs& args) {
    ExperimentConfig cfg;
    args.graph.apply_to(cfg.graph, args.rho);
    cfg.kind = protocol_from_string(args.protocol);
    cfg.c = parse_c_option(args.c_text);
    cfg.eta = args.eta;
    cfg.rho = args.rho;
    cfg.d = args.d;
    cfg.quotas = quotas_from_string(args.quotas);
    cfg.max_rounds = args.max_rounds;
    cfg.metrics = metrics_from_string(args.metrics);

    const auto g = cfg.graph.file.empty() ? cfg.graph.build() : load_graph_file(cfg.graph.file);
    if (cfg.c == 0) cfg.c = recommended_c(cfg.eta, cfg.rho, cfg.d);
    if (cfg.max_rounds == 0) cfg.max_rounds = Simulation::default_max_rounds(g.size());

    const auto result = run_trial(g, cfg, args.seed);

    if (!args.csv.empty())
        write_text(args.csv, [&](std::ostream& out) { write_run_rounds_csv(out, result); });
    const auto summary = run_summary_json(result);
    if (!args.json_path.empty())
        write_text(args.json_path, [&](std::ostream& out) { out << summary; });
    else
        std::cout << summary;

    return result.non_terminated ? kExitNonTermination : kExitOk;
}

// --------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string config_file;
    GraphCli graph;
    std::string protocol;
    std::string c_text;
    double eta = 1.0;
    double rho = 1.0;
    std::uint32_t d = 1;
    std::string quotas;
    std::uint32_t trials = 0;
    std::uint64_t base_seed = 0;
    std::uint64_t max_rounds = 0;
    std::string metrics;
    unsigned workers = 0;
    std::string csv;
    std::string json_path;

    CLI::Option *opt_protocol = nullptr, *opt_c = nullptr, *opt_eta = nullptr, *opt_rho = nullptr,
                *opt_d = nullptr, *opt_quotas = nullptr, *opt_trials = nullptr,
                *opt_base_seed = nullptr, *opt_max_rounds = nullptr, *opt_metrics = nullptr,
                *opt_workers = nullptr, *opt_csv = nullptr, *opt_json = nullptr;
};

void load_config_file(const std::string& path, ExperimentConfig& cfg, std::string& csv,
                      std::string& json_path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw ConfigError("config file: " + std::string(e.what()));
    }
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "graph") {
                if (value.contains("file")) {
                    cfg.graph.file = value.at("file").get<std::string>();
                } else if (value.contains("regular")) {
                    const auto& r = value.at("regular");
                    cfg.graph.regular = RegularGraphSpec{r.at("n").get<std::uint32_t>(),
                                                         r.at("delta").get<std::uint32_t>()};
                } else if (value.contains("almost_regular")) {
                    const auto& a = value.at("almost_regular");
                    cfg.graph.almost_regular = AlmostRegularGraphSpec{
                        a.at("n").get<std::uint32_t>(), a.at("delta_min_c").get<std::uint32_t>(),
                        a.value("rho", 1.0), a.value("heavy_fraction", 0.0)};
                } else {
                    throw ConfigError("config graph: need file, regular, or almost_regular");
                }
            } else if (key == "graph_seed") {
                cfg.graph.seed = value.get<std::uint64_t>();
            } else if (key == "protocol") {
                cfg.kind = protocol_from_string(value.get<std::string>());
            } else if (key == "c") {
                cfg.c = value.is_string() ? parse_c_option(value.get<std::string>())
                                          : value.get<std::uint32_t>();
            } else if (key == "eta") {
                cfg.eta = value.get<double>();
            } else if (key == "rho") {
                cfg.rho = value.get<double>();
            } else if (key == "d") {
                cfg.d = value.get<std::uint32_t>();
            } else if (key == "quotas") {
                cfg.quotas = quotas_from_string(value.get<std::string>());
            } else if (key == "trials") {
                cfg.trials = value.get<std::uint32_t>();
            } else if (key == "base_seed") {
                cfg.base_seed = value.get<std::uint64_t>();
            } else if (key == "max_rounds") {
                cfg.max_rounds = value.get<std::uint64_t>();
            } else if (key == "metrics") {
                cfg.metrics = metrics_from_string(value.get<std::string>());
            } else if (key == "workers") {
                cfg.workers = value.get<unsigned>();
            } else if (key == "csv") {
                csv = value.get<std::string>();
            } else if (key == "json") {
                json_path = value.get<std::string>();
            } else {
                throw ConfigError("config file: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError("config file: " + std::string(e.what()));
    }
}

int cmd_experiment(const ExperimentArgs& args) {
    ExperimentConfig cfg;
    std::string csv = "experiment_rounds.csv";
    std::string json_path = "experiment_summary.json";

    if (!args.config_file.empty()) load_config_file(args.config_file, cfg, csv, json_path);

    // Command-line flags override the config file. Scalars first so a graph
    // given on the command line picks up the effective rho.
    if (args.opt_protocol->count()) cfg.kind = protocol_from_string(args.protocol);
    if (args.opt_c->count()) cfg.c = parse_c_option(args.c_text);
    if (args.opt_eta->count()) cfg.eta = args.eta;
    if (args.opt_rho->count()) cfg.rho = args.rho;
    if (args.graph.any_set()) args.graph.apply_to(cfg.graph, cfg.rho);
    if (args.graph.opt_seed->count()) cfg.graph.seed = args.graph.seed;
    if (args.opt_d->count()) cfg.d = args.d;
    if (args.opt_quotas->count()) cfg.quotas = quotas_from_string(args.quotas);
    if (args.opt_trials->count()) cfg.trials = args.trials;
    if (args.opt_base_seed->count()) cfg.base_seed = args.base_seed;
    if (args.opt_max_rounds->count()) cfg.max_rounds = args.max_rounds;
    if (args.opt_metrics->count()) cfg.metrics = metrics_from_string(args.metrics);
    if (args.opt_workers->count()) cfg.workers = args.workers;
    if (args.opt_csv->count()) csv = args.csv;
    if (args.opt_json->count()) json_path = args.json_path;

    if (cfg.trials == 0) throw ConfigError("experiment needs --trials >= 1");
    if (cfg.d == 0) throw ConfigError("experiment needs --d >= 1");

    const auto g =
        cfg.graph.file.empty() ? cfg.graph.build() : load_graph_file(cfg.graph.file);
    const auto result = run_experiment(cfg, g);

    write_text(csv, [&](std::ostream& out) { write_experiment_rounds_csv(out, result); });
    write_text(json_path,
               [&](std::ostream& out) { out << experiment_summary_json(result); });

    std::cerr << "experiment: " << result.aggregate.completed << '/' << cfg.trials
              << " trials completed, summary " << json_path << ", rounds " << csv << '\n';
    return kExitOk;
}

// ------------------------------------------------------------------- theory

struct TheoryArgs {
    std::uint32_t n = 0;
    std::uint32_t d = 1;
    std::string c_text = "auto";
    double eta = 1.0;
    double rho = 1.0;
    std::uint32_t delta_min_c = 0;
    std::uint32_t delta_max_s = 0;
    std::string csv = "-";
    std::string json_path;
};

int cmd_theory(const TheoryArgs& args) {
    TheoryParams params;
    params.n = args.n;
    params.d = args.d;
    params.eta = args.eta;
    params.rho = args.rho;
    const double log_n = std::log(static_cast<double>(args.n));
    params.delta_min_c = args.delta_min_c
                             ? args.delta_min_c
                             : static_cast<std::uint32_t>(std::ceil(args.eta * log_n * log_n));
    params.delta_max_s = args.delta_max_s
                             ? args.delta_max_s
                             : static_cast<std::uint32_t>(
                                   std::ceil(args.rho * params.delta_min_c));
    params.c = parse_c_option(args.c_text);
    if (params.c == 0) params.c = recommended_c(args.eta, args.rho, args.d);

    TheoryEnvelope env;
    try {
        env = envelope(params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("envelope error: ") + e.what());
    }

    const auto header = theory_json_compact(env, params);
    write_text(args.csv, [&](std::ostream& out) { write_theory_csv(out, env, header); });
    if (!args.json_path.empty())
        write_text(args.json_path,
                   [&](std::ostream& out) { out << theory_json(env, params); });
    return kExitOk;
}

// -------------------------------------------------------------------- check

struct CheckArgs {
    std::string summary;
    std::string rounds;
    std::string json_path;
};

int cmd_check(const CheckArgs& args) {
    SummaryDoc summary;
    try {
        summary = parse_experiment_summary(read_text(args.summary));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    std::vector<RoundRow> rounds;
    {
        std::ifstream in(args.rounds);
        if (!in) throw IoError("cannot open: " + args.rounds);
        try {
            rounds = parse_rounds_csv(in);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }

    const auto verdicts = evaluate_criteria(inputs_from_files(summary, std::move(rounds)));
    for (const auto& v : verdicts)
        std::cout << to_string(v.verdict) << ' ' << v.id << ": " << v.detail << '\n';

    if (!args.json_path.empty()) {
        json arr = json::array();
        for (const auto& v : verdicts)
            arr.push_back({{"id", v.id},
                           {"verdict", std::string(to_string(v.verdict))},
                           {"detail", v.detail}});
        write_text(args.json_path, [&](std::ostream& out) { out << arr.dump(2) << '\n'; });
    }
    return any_failed(verdicts) ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator and analysis toolkit for the SAER and RAES "
                 "threshold load-balancing protocols"};
    app.require_subcommand(1);
    int rc = kExitOk;

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a graph and write its edge list");
    gen.graph.add_options(generate, /*with_file=*/false);
    generate->add_option("--rho", gen.rho, "Degree ratio bound (generator and precondition)");
    generate->add_option("--eta", gen.eta, "Degree exponent for the precondition check");
    generate->add_option("--out", gen.out, "Output edge-list path ('-' for stdout)")->required();
    generate->callback([&] { rc = cmd_generate(gen); });

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Run one seeded simulation");
    run.graph.add_options(run_cmd, /*with_file=*/true);
    run_cmd->add_option("--protocol", run.protocol, "saer or raes");
    run_cmd->add_option("--c", run.c_text, "Capacity factor (integer or 'auto')");
    run_cmd->add_option("--eta", run.eta, "eta used when --c auto");
    run_cmd->add_option("--rho", run.rho, "rho used when --c auto and for --almost-regular");
    run_cmd->add_option("--d", run.d, "Request number (balls per client)");
    run_cmd->add_option("--quotas", run.quotas, "full or zero");
    run_cmd->add_option("--seed", run.seed, "Run seed");
    run_cmd->add_option("--max-rounds", run.max_rounds, "Round horizon (0 = default)");
    run_cmd->add_option("--metrics", run.metrics, "full or light");
    run_cmd->add_option("--csv", run.csv, "Per-round CSV path ('-' for stdout)");
    run_cmd->add_option("--json", run.json_path, "Summary JSON path (default stdout)");
    run_cmd->callback([&] { rc = cmd_run(run); });

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "Run a multi-trial experiment");
    experiment->add_option("--config", exp.config_file, "JSON config file (flags override it)");
    exp.graph.add_options(experiment, /*with_file=*/true);
    exp.opt_protocol = experiment->add_option("--protocol", exp.protocol, "saer or raes");
    exp.opt_c = experiment->add_option("--c", exp.c_text, "Capacity factor (integer or 'auto')");
    exp.opt_eta = experiment->add_option("--eta", exp.eta, "eta used when --c auto");
    exp.opt_rho = experiment->add_option("--rho", exp.rho, "rho bound");
    exp.opt_d = experiment->add_option("--d", exp.d, "Request number");
    exp.opt_quotas = experiment->add_option("--quotas", exp.quotas, "full or zero");
    exp.opt_trials = experiment->add_option("--trials", exp.trials, "Number of trials");
    exp.opt_base_seed =
        experiment->add_option("--base-seed", exp.base_seed, "Trial i uses base_seed + i");
    exp.opt_max_rounds =
        experiment->add_option("--max-rounds", exp.max_rounds, "Round horizon (0 = default)");
    exp.opt_metrics = experiment->add_option("--metrics", exp.metrics, "full or light");
    exp.opt_workers = experiment->add_option("--workers", exp.workers, "Worker threads (0 = all)");
    exp.opt_csv = experiment->add_option("--csv", exp.csv, "Rounds CSV path");
    exp.opt_json = experiment->add_option("--json", exp.json_path, "Summary JSON path");
    experiment->callback([&] { rc = cmd_experiment(exp); });

    TheoryArgs theory;
    auto* theory_cmd = app.add_subcommand("theory", "Evaluate the analytic envelope");
    theory_cmd->add_option("--n", theory.n, "Instance size")->required();
    theory_cmd->add_option("--d", theory.d, "Request number");
    theory_cmd->add_option("--c", theory.c_text, "Capacity factor (integer or 'auto')");
    theory_cmd->add_option("--eta", theory.eta, "Degree exponent");
    theory_cmd->add_option("--rho", theory.rho, "Degree ratio bound");
    theory_cmd->add_option("--delta-min-c", theory.delta_min_c,
                           "Override min client degree (default ceil(eta ln^2 n))");
    theory_cmd->add_option("--delta-max-s", theory.delta_max_s,
                           "Override max server degree (default ceil(rho * delta_min_c))");
    theory_cmd->add_option("--csv", theory.csv, "Envelope CSV path ('-' for stdout)");
    theory_cmd->add_option("--json", theory.json_path, "Envelope JSON path");
    theory_cmd->callback([&] { rc = cmd_theory(theory); });

    CheckArgs check;
    auto* check_cmd =
        app.add_subcommand("check", "Evaluate experiment outputs against the criteria");
    check_cmd->add_option("--summary", check.summary, "Experiment summary JSON")->required();
    check_cmd->add_option("--rounds", check.rounds, "Experiment rounds CSV")->required();
    check_cmd->add_option("--json", check.json_path, "Write verdicts as JSON");
    check_cmd->callback([&] { rc = cmd_check(check); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "saersim: " << e.what() << '\n';
        return kExitIo;
    } catch (const ConfigError& e) {
        std::cerr << "saersim: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GraphParseError& e) {
        std::cerr << "saersim: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "saersim: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "saersim: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
