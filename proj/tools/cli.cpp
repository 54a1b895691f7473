#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "synpid/distribution.hpp"
#include "synpid/dynamics.hpp"
#include "synpid/eca.hpp"
#include "synpid/experiments.hpp"
#include "synpid/lattice.hpp"
#include "synpid/pid.hpp"

namespace synpid::cli {

namespace {

/// Bad flag values; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    f << content;
    if (!f) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

nlohmann::json load_config(const std::string& path)
{
    std::ifstream f(path);
    if (!f) {
        throw UsageError("cannot read config file '" + path + "'");
    }
    try {
        auto doc = nlohmann::json::parse(f);
        if (!doc.is_object()) {
            throw UsageError("config file must hold a JSON object");
        }
        return doc;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("invalid config file: " + std::string(e.what()));
    }
}

/// Applies a config value unless the flag was given on the command line.
template <class T>
void overlay(const CLI::App& sub, const nlohmann::json& config, const std::string& key, T& value)
{
    if (!config.contains(key)) {
        return;
    }
    const auto* opt = sub.get_option_no_throw("--" + key);
    if (opt != nullptr && opt->count() > 0) {
        return;
    }
    try {
        value = config.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw UsageError("config key '" + key + "' has the wrong type");
    }
}

std::uint64_t default_seed()
{
    if (const char* env = std::getenv("SYNPID_SEED")) {
        std::uint64_t seed = 0;
        const std::string_view s(env);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw UsageError("SYNPID_SEED must be a nonnegative integer");
        }
        return seed;
    }
    return 1;
}

/// Seed from the config file, else SYNPID_SEED, else 1.
std::uint64_t seed_from(const nlohmann::json& config)
{
    if (!config.contains("seed")) {
        return default_seed();
    }
    if (!config["seed"].is_number_unsigned()) {
        throw UsageError("config key 'seed' must be a nonnegative integer");
    }
    return config["seed"].get<std::uint64_t>();
}

template <class F>
void as_usage(F&& f)
{
    try {
        f();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    } catch (const std::out_of_range& e) {
        throw UsageError(e.what());
    }
}

std::string join_lines(const nlohmann::json& doc)
{
    return doc.dump(2) + "\n";
}

} // namespace

SymbolTable read_symbol_csv(std::istream& in)
{
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
                cell.pop_back();
            }
            while (!cell.empty() && cell.front() == ' ') {
                cell.erase(cell.begin());
            }
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        return cells;
    };
    SymbolTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("CSV input is empty");
    }
    table.names = split(line);
    const std::size_t ncol = table.names.size();
    table.columns.resize(ncol);
    table.alphabets.resize(ncol);
    std::vector<std::map<long long, std::uint32_t>> seen(ncol);
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != ncol) {
            throw std::runtime_error("ragged CSV: row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ncol));
        }
        for (std::size_t c = 0; c < ncol; ++c) {
            long long v = 0;
            const auto& s = cells[c];
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
                throw std::runtime_error("non-integer cell '" + s + "' at row " +
                                         std::to_string(row));
            }
            auto [it, inserted] =
                seen[c].emplace(v, static_cast<std::uint32_t>(table.alphabets[c].size()));
            if (inserted) {
                table.alphabets[c].push_back(v);
            }
            table.columns[c].push_back(it->second);
        }
    }
    return table;
}

nlohmann::json analyze(const SymbolTable& table, const std::string& destination,
                       const std::vector<std::string>& sources, int k)
{
    auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < table.names.size(); ++i) {
            if (table.names[i] == name) {
                return i;
            }
        }
        throw std::invalid_argument("unknown column '" + name + "'");
    };
    if (k < 1) {
        throw std::invalid_argument("k must be >= 1");
    }
    if (sources.empty()) {
        throw std::invalid_argument("at least one source column is required");
    }
    if (static_cast<int>(sources.size()) + 1 > pid::kMaxSources) {
        throw std::invalid_argument("at most " + std::to_string(pid::kMaxSources - 1) +
                                    " source columns are supported");
    }
    const std::size_t dest_col = column(destination);
    std::vector<std::size_t> src_cols;
    for (const auto& s : sources) {
        const auto c = column(s);
        if (c == dest_col) {
            throw std::invalid_argument("destination '" + s + "' also listed as a source");
        }
        for (auto prev : src_cols) {
            if (prev == c) {
                throw std::invalid_argument("source '" + s + "' listed twice");
            }
        }
        src_cols.push_back(c);
    }
    const auto& dest = table.columns[dest_col];
    const std::size_t n = dest.size();
    if (n < static_cast<std::size_t>(k) + 1) {
        throw std::runtime_error("series too short for history length k");
    }
    auto arity_of = [&](std::size_t col) {
        return std::max<Symbol>(2, static_cast<Symbol>(table.alphabets[col].size()));
    };
    const Symbol base = arity_of(dest_col);
    if (std::pow(static_cast<double>(base), k) > 4294967295.0) {
        throw std::invalid_argument("destination alphabet ^ k exceeds the history symbol range");
    }
    Symbol history_arity = 1;
    for (int i = 0; i < k; ++i) {
        history_arity *= base;
    }

    const std::string next_name = "dest.next";
    const std::string history_name = "dest.history";
    std::vector<VariableSpec> vars{{next_name, base, VariableRole::destination_next},
                                   {history_name, history_arity,
                                    VariableRole::destination_history}};
    for (std::size_t i = 0; i < sources.size(); ++i) {
        vars.push_back({sources[i], arity_of(src_cols[i]), VariableRole::source});
    }
    DistributionCounter counter(vars);
    std::vector<Symbol> tuple(vars.size());
    for (std::size_t t = k - 1; t + 1 < n; ++t) {
        tuple[0] = dest[t + 1];
        tuple[1] = embed_history(dest, k, t, base);
        for (std::size_t i = 0; i < src_cols.size(); ++i) {
            tuple[2 + i] = table.columns[src_cols[i]][t];
        }
        counter.add(tuple);
    }
    const auto dist = counter.build();

    dynamics::DynamicsConfig config{k, next_name, history_name, sources};
    dynamics::InformationDynamics dyn(dist, config);
    nlohmann::json te = nlohmann::json::object();
    for (const auto& s : sources) {
        te[s] = {{"apparent", dyn.transfer_entropy(s)},
                 {"complete", dyn.complete_transfer_entropy(s)}};
    }
    auto decomposition = pid::modified_information(dist, config);
    decomposition.source_names.front() = destination + ".history";

    // Leading-order plug-in bias of the total MI for independent variables:
    // (|X| - 1)(|S| - 1) / (2 N ln 2), with observed alphabet sizes.
    const double samples = dist.total();
    const auto observed = [&](const VarSet& vars_) {
        return static_cast<double>(dist.marginal(vars_).support_size());
    };
    VarSet all_sources;
    for (std::size_t i = 1; i < vars.size(); ++i) {
        all_sources.push_back(i);
    }
    const double bias = (observed({0}) - 1.0) * (observed(all_sources) - 1.0) /
                        (2.0 * samples * std::log(2.0));

    nlohmann::json mapping = nlohmann::json::object();
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        mapping[table.names[c]] = table.alphabets[c];
    }
    return {{"version", 1},
            {"destination", destination},
            {"sources", sources},
            {"k", k},
            {"samples", samples},
            {"active_info_storage", dyn.active_info_storage()},
            {"transfer_entropy", te},
            {"total_mi", decomposition.total},
            {"decomposition", pid::to_json(decomposition)},
            {"modified_information", decomposition.modified},
            {"hierarchy", decomposition.hierarchy},
            {"bias_bound_bits", bias},
            {"symbol_mapping", mapping},
            {"distribution", dist.to_json()}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Information dynamics and partial information decomposition toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    unsigned threads = 0;
    app.add_option("--config", config_path, "JSON file with defaults for command flags");
    app.add_option("--threads", threads, "Worker threads (0 = machine parallelism)");

    // ca-run
    auto* ca = app.add_subcommand("ca-run", "Simulate an elementary CA and export the grid");
    int ca_rule = 110;
    int ca_width = 200;
    int ca_steps = 200;
    std::uint64_t ca_seed = 0;
    std::string ca_format = "pgm";
    std::string ca_out;
    ca->add_option("--rule", ca_rule, "Wolfram rule number")->required();
    ca->add_option("--width", ca_width, "Cells");
    ca->add_option("--steps", ca_steps, "Time steps (rows)");
    ca->add_option("--seed", ca_seed, "Initial-row seed");
    ca->add_option("--format", ca_format, "pgm or csv")->check(CLI::IsMember({"pgm", "csv"}));
    ca->add_option("--out", ca_out, "Output file")->required();

    // table1
    auto* t1 = app.add_subcommand("table1", "Hierarchy of modified information over ECA rules");
    experiments::ExperimentConfig t1_cfg;
    std::uint64_t t1_seed = 0;
    std::string t1_out;
    std::string t1_text;
    t1->add_option("--rules", t1_cfg.rules, "Rule numbers")->delimiter(',');
    t1->add_option("--runs", t1_cfg.runs, "Repeat runs per rule");
    t1->add_option("--width", t1_cfg.width, "Cells");
    t1->add_option("--steps", t1_cfg.steps, "Time steps (rows)");
    t1->add_option("--k", t1_cfg.k, "History length");
    t1->add_option("--seed", t1_seed, "Base seed; run i uses seed + i");
    t1->add_option("--out", t1_out, "JSON report path");
    t1->add_option("--text", t1_text, "Plain-text table path");

    // or-demo
    auto* od = app.add_subcommand("or-demo", "Local I_min on the perturbed OR gate");
    double od_delta = 1e-6;
    std::string od_out;
    od->add_option("--delta", od_delta, "Perturbation of p(0,1) and p(1,0)");
    od->add_option("--out", od_out, "JSON output path");

    // profile
    auto* pr = app.add_subcommand("profile", "Export local information profiles of one run");
    experiments::ExperimentConfig pr_cfg;
    int pr_rule = 54;
    std::uint64_t pr_seed = 0;
    std::vector<std::string> pr_measures{"local_ais"};
    std::string pr_dir = ".";
    pr->add_option("--rule", pr_rule, "Wolfram rule number");
    pr->add_option("--runs", pr_cfg.runs, "Runs pooled for the distribution");
    pr->add_option("--width", pr_cfg.width, "Cells");
    pr->add_option("--steps", pr_cfg.steps, "Time steps (rows)");
    pr->add_option("--k", pr_cfg.k, "History length");
    pr->add_option("--seed", pr_seed, "Base seed; the displayed run uses this seed");
    pr->add_option("--measures", pr_measures,
                   "local_ais, local_te_left, local_te_right, local_separable")
        ->delimiter(',');
    pr->add_option("--out-dir", pr_dir, "Output directory");

    // analyze
    auto* an = app.add_subcommand("analyze", "Analyze a CSV of integer symbol series");
    std::string an_input;
    std::string an_dest;
    std::vector<std::string> an_sources;
    int an_k = 1;
    std::string an_out;
    an->add_option("--input", an_input, "CSV with a header row")->required();
    an->add_option("--destination", an_dest, "Destination column")->required();
    an->add_option("--sources", an_sources, "Source columns")->delimiter(',')->required();
    an->add_option("--k", an_k, "Destination history length");
    an->add_option("--out", an_out, "JSON report path (default: standard output)");
    std::string an_dist;
    an->add_option("--save-distribution", an_dist, "Write the counted distribution snapshot");

    // lattice
    auto* la = app.add_subcommand("lattice", "Print the redundancy lattice");
    int la_sources = 2;
    std::string la_out;
    la->add_option("--sources", la_sources, "Number of sources r")->required();
    la->add_option("--out", la_out, "JSON output path");

    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        nlohmann::json config = nlohmann::json::object();
        if (!config_path.empty()) {
            config = load_config(config_path);
        }
        overlay(app, config, "threads", threads);

        if (ca->parsed()) {
            overlay(*ca, config, "rule", ca_rule);
            overlay(*ca, config, "width", ca_width);
            overlay(*ca, config, "steps", ca_steps);
            overlay(*ca, config, "format", ca_format);
            if (ca->get_option("--seed")->count() == 0) {
                ca_seed = seed_from(config);
            }
            eca::SpacetimeGrid grid(3, 1, 0, {0, 0, 0});
            as_usage([&] { grid = eca::run(eca::decode_rule(ca_rule), ca_width, ca_steps, ca_seed); });
            std::ostringstream buf;
            if (ca_format == "csv") {
                eca::write_csv(grid, buf);
            } else {
                eca::write_pgm(grid, buf);
            }
            write_file(ca_out, buf.str());
            return kExitOk;
        }

        if (t1->parsed()) {
            overlay(*t1, config, "rules", t1_cfg.rules);
            overlay(*t1, config, "runs", t1_cfg.runs);
            overlay(*t1, config, "width", t1_cfg.width);
            overlay(*t1, config, "steps", t1_cfg.steps);
            overlay(*t1, config, "k", t1_cfg.k);
            overlay(*t1, config, "out", t1_out);
            overlay(*t1, config, "text", t1_text);
            if (t1->get_option("--seed")->count() == 0) {
                t1_seed = seed_from(config);
            }
            t1_cfg.base_seed = t1_seed;
            t1_cfg.threads = threads;
            as_usage([&] { t1_cfg.validate(); });
            const auto report = experiments::run_table1(t1_cfg);
            const auto text = experiments::format_table(report);
            out << text;
            if (!t1_out.empty()) {
                write_file(t1_out, join_lines(experiments::to_json(report)));
            }
            if (!t1_text.empty()) {
                write_file(t1_text, text);
            }
            return kExitOk;
        }

        if (od->parsed()) {
            overlay(*od, config, "delta", od_delta);
            overlay(*od, config, "out", od_out);
            experiments::OrDemo demo;
            as_usage([&] { demo = experiments::run_or_demo(od_delta); });
            out << experiments::format_or_demo(demo);
            if (!od_out.empty()) {
                write_file(od_out, join_lines(experiments::to_json(demo)));
            }
            return kExitOk;
        }

        if (pr->parsed()) {
            overlay(*pr, config, "rule", pr_rule);
            overlay(*pr, config, "runs", pr_cfg.runs);
            overlay(*pr, config, "width", pr_cfg.width);
            overlay(*pr, config, "steps", pr_cfg.steps);
            overlay(*pr, config, "k", pr_cfg.k);
            overlay(*pr, config, "measures", pr_measures);
            overlay(*pr, config, "out-dir", pr_dir);
            if (pr->get_option("--seed")->count() == 0) {
                pr_seed = seed_from(config);
            }
            pr_cfg.base_seed = pr_seed;
            pr_cfg.threads = threads;
            pr_cfg.rules = {pr_rule};
            as_usage([&] {
                pr_cfg.validate();
                for (const auto& m : pr_measures) {
                    experiments::parse_measure(m);
                }
            });
            for (const auto& path :
                 experiments::export_local_profiles(pr_rule, pr_cfg, pr_measures, pr_dir)) {
                out << path.string() << '\n';
            }
            return kExitOk;
        }

        if (an->parsed()) {
            overlay(*an, config, "k", an_k);
            overlay(*an, config, "out", an_out);
            std::ifstream in(an_input);
            if (!in) {
                throw std::runtime_error("cannot read '" + an_input + "'");
            }
            const auto table = read_symbol_csv(in);
            nlohmann::json report;
            as_usage([&] { report = analyze(table, an_dest, an_sources, an_k); });
            if (!an_dist.empty()) {
                write_file(an_dist, join_lines(report["distribution"]));
            }
            report.erase("distribution");
            if (an_out.empty()) {
                out << join_lines(report);
            } else {
                write_file(an_out, join_lines(report));
            }
            return kExitOk;
        }

        if (la->parsed()) {
            overlay(*la, config, "out", la_out);
            pid::RedundancyLattice lattice;
            as_usage([&] { lattice = pid::RedundancyLattice::build(la_sources); });
            out << "nodes " << lattice.size() << '\n';
            for (const auto& node : lattice.nodes()) {
                out << node.text() << '\n';
            }
            out << "edges " << lattice.covering_edges().size() << '\n';
            nlohmann::json edges = nlohmann::json::array();
            for (const auto& [lo, hi] : lattice.covering_edges()) {
                out << lattice.node(lo).text() << " < " << lattice.node(hi).text() << '\n';
                edges.push_back({lattice.node(lo).text(), lattice.node(hi).text()});
            }
            if (!la_out.empty()) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& node : lattice.nodes()) {
                    nodes.push_back(node.text());
                }
                write_file(la_out, join_lines({{"sources", la_sources},
                                               {"nodes", nodes},
                                               {"edges", edges}}));
            }
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace synpid::cli
