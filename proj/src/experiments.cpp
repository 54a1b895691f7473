#include "synpid/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "synpid/parallel.hpp"

namespace synpid::experiments {

namespace {

constexpr const char* kNext = "next";
constexpr const char* kHistory = "history";
constexpr const char* kLeft = "left";
constexpr const char* kRight = "right";

std::string fixed3(double v)
{
    // Avoid printing "-0.000" for tiny negative round-off.
    if (std::abs(v) < 5e-4) {
        v = 0.0;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (rules.empty()) {
        throw std::invalid_argument("at least one rule is required");
    }
    for (int r : rules) {
        eca::decode_rule(r);
    }
    if (runs < 1) {
        throw std::invalid_argument("runs must be >= 1");
    }
    if (width < 3) {
        throw std::invalid_argument("width must be >= 3");
    }
    if (k < 1) {
        throw std::invalid_argument("k must be >= 1");
    }
    if (k > 24) {
        throw std::invalid_argument("k must be <= 24");
    }
    if (steps <= k) {
        throw std::invalid_argument("steps must exceed k");
    }
}

std::vector<VariableSpec> eca_variables(int k)
{
    return {{kNext, 2, VariableRole::destination_next},
            {kHistory, Symbol{1} << k, VariableRole::destination_history},
            {kLeft, 2, VariableRole::source},
            {kRight, 2, VariableRole::source}};
}

dynamics::DynamicsConfig eca_dynamics(int k)
{
    return {k, kNext, kHistory, {kLeft, kRight}};
}

std::array<Symbol, 4> eca_observation(const eca::SpacetimeGrid& grid, int k, int time, int cell)
{
    if (time < k || time >= grid.steps()) {
        throw std::out_of_range("observation time must lie in [k, steps)");
    }
    const int w = grid.width();
    Symbol history = 0;
    for (int j = 0; j < k; ++j) {
        history |= Symbol{grid.at(time - 1 - j, cell)} << j;
    }
    return {grid.at(time, cell), history, grid.at(time - 1, (cell + w - 1) % w),
            grid.at(time - 1, (cell + 1) % w)};
}

void count_eca_samples(const eca::SpacetimeGrid& grid, int k, DistributionCounter& counter)
{
    const int w = grid.width();
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    const std::uint64_t history_arity = std::uint64_t{1} << k;
    for (int c = 0; c < w; ++c) {
        std::uint64_t history = 0;
        for (int t = 1; t < grid.steps(); ++t) {
            // History ending at t-1: most recent value in bit 0.
            history = ((history << 1) | grid.at(t - 1, c)) & mask;
            if (t < k) {
                continue;
            }
            const std::uint64_t left = grid.at(t - 1, (c + w - 1) % w);
            const std::uint64_t right = grid.at(t - 1, (c + 1) % w);
            const std::uint64_t next = grid.at(t, c);
            counter.add_key(((next * history_arity + history) * 2 + left) * 2 + right);
        }
    }
}

JointDistribution eca_distribution(const eca::SpacetimeGrid& grid, int k)
{
    DistributionCounter counter(eca_variables(k));
    count_eca_samples(grid, k, counter);
    return counter.build();
}

std::vector<JointDistribution> pooled_distributions(int rule, const ExperimentConfig& config,
                                                    std::span<const int> ks)
{
    const auto table = eca::decode_rule(rule);
    const unsigned workers = resolve_threads(config.threads);
    std::vector<std::vector<JointDistribution>> partial(workers);
    parallel_chunks(static_cast<std::size_t>(config.runs), workers,
                    [&](std::size_t begin, std::size_t end, unsigned w) {
                        std::vector<DistributionCounter> counters;
                        for (int k : ks) {
                            counters.emplace_back(eca_variables(k));
                        }
                        for (std::size_t i = begin; i < end; ++i) {
                            const auto grid = eca::run(table, config.width, config.steps,
                                                       config.base_seed + i);
                            for (std::size_t j = 0; j < ks.size(); ++j) {
                                count_eca_samples(grid, ks[j], counters[j]);
                            }
                        }
                        for (auto& c : counters) {
                            partial[w].push_back(c.build());
                        }
                    });
    std::vector<JointDistribution> out;
    for (std::size_t j = 0; j < ks.size(); ++j) {
        JointDistribution pooled(eca_variables(ks[j]), {});
        for (const auto& p : partial) {
            if (!p.empty()) {
                pooled = merge(pooled, p[j]);
            }
        }
        out.push_back(std::move(pooled));
    }
    return out;
}

DecompositionSummary summarize(const pid::PidDecomposition& d, double samples)
{
    return {d.k, samples, d.total, d.hierarchy, d.modified};
}

TableReport run_table1(const ExperimentConfig& config)
{
    config.validate();
    TableReport report{config, {}};
    for (int rule : config.rules) {
        const std::vector<int> ks{config.k, 1};
        const auto dists = pooled_distributions(rule, config, ks);
        RuleReport r;
        r.rule = rule;
        r.at_k = summarize(pid::modified_information(dists[0], eca_dynamics(config.k)),
                           dists[0].total());
        r.at_k1 = summarize(pid::modified_information(dists[1], eca_dynamics(1)),
                            dists[1].total());
        r.first_seed = config.base_seed;
        r.last_seed = config.base_seed + static_cast<std::uint64_t>(config.runs) - 1;
        report.rules.push_back(std::move(r));
    }
    return report;
}

namespace {

nlohmann::json summary_json(const DecompositionSummary& s)
{
    return {{"k", s.k},
            {"samples", s.samples},
            {"total_mi", s.total_mi},
            {"hierarchy", s.hierarchy},
            {"modified_information", s.modified},
            {"non_modified_information", s.total_mi - s.modified}};
}

} // namespace

nlohmann::json to_json(const TableReport& report)
{
    const auto& c = report.config;
    nlohmann::json rules = nlohmann::json::array();
    for (const auto& r : report.rules) {
        rules.push_back({{"rule", r.rule},
                         {"at_k", summary_json(r.at_k)},
                         {"at_k1", summary_json(r.at_k1)},
                         {"seeds", {{"first", r.first_seed}, {"last", r.last_seed}}}});
    }
    return {{"version", 1},
            {"config",
             {{"rules", c.rules},
              {"runs", c.runs},
              {"width", c.width},
              {"steps", c.steps},
              {"k", c.k},
              {"base_seed", c.base_seed}}},
            {"rules", rules}};
}

std::string format_table(const TableReport& report)
{
    const std::string mk = "M_X(k=" + std::to_string(report.config.k) + ")";
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-5s %9s %9s %9s %11s %10s\n", "Rule", "Pi(o=1)", "Pi(o=2)",
                  "Pi(o=3)", mk.c_str(), "M_X(k=1)");
    out << buf;
    for (const auto& r : report.rules) {
        std::snprintf(buf, sizeof buf, "%-5d %9s %9s %9s %11s %10s\n", r.rule,
                      fixed3(r.at_k.hierarchy[0]).c_str(), fixed3(r.at_k.hierarchy[1]).c_str(),
                      fixed3(r.at_k.hierarchy[2]).c_str(), fixed3(r.at_k.modified).c_str(),
                      fixed3(r.at_k1.modified).c_str());
        out << buf;
    }
    return out.str();
}

JointDistribution or_distribution(double delta)
{
    if (!(std::abs(delta) < 0.25)) {
        throw std::invalid_argument("OR perturbation must satisfy |delta| < 0.25");
    }
    std::vector<VariableSpec> vars{{"x", 2, VariableRole::destination_next},
                                   {"a1", 2, VariableRole::source},
                                   {"a2", 2, VariableRole::source}};
    return JointDistribution::from_rows(std::move(vars), {{{0, 0, 0}, 0.25},
                                                          {{1, 0, 1}, 0.25 + delta},
                                                          {{1, 1, 0}, 0.25 - delta},
                                                          {{1, 1, 1}, 0.25}});
}

pid::PidProblem or_problem()
{
    return {{0}, {{1}, {2}}, {"a1", "a2"}};
}

OrDemo run_or_demo(double delta)
{
    const auto dist = or_distribution(delta);
    const pid::Imin imin(dist, or_problem());
    const auto node = pid::Antichain::parse("{1}{2}");
    OrDemo demo;
    demo.delta = delta;
    demo.average_redundancy = imin.redundancy(node);
    for (Symbol a1 = 0; a1 < 2; ++a1) {
        for (Symbol a2 = 0; a2 < 2; ++a2) {
            const Symbol x = a1 | a2;
            const std::array<Symbol, 3> obs{x, a1, a2};
            const auto local = imin.local(node, obs);
            OrRow row;
            row.a1 = a1;
            row.a2 = a2;
            row.x = x;
            row.probability = dist.probability(obs);
            row.argmin_source = node.subsets()[local.subset].members().front() + 1;
            row.value = local.value;
            row.tie = local.tie;
            demo.tie = demo.tie || local.tie;
            demo.rows.push_back(row);
        }
    }
    return demo;
}

nlohmann::json to_json(const OrDemo& demo)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : demo.rows) {
        rows.push_back({{"a1", r.a1},
                        {"a2", r.a2},
                        {"x", r.x},
                        {"probability", r.probability},
                        {"argmin", "A" + std::to_string(r.argmin_source)},
                        {"local_redundancy", r.value},
                        {"tie", r.tie}});
    }
    return {{"delta", demo.delta},
            {"rows", rows},
            {"average_redundancy", demo.average_redundancy},
            {"non_unique", demo.tie}};
}

std::string format_or_demo(const OrDemo& demo)
{
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "delta = %g\n%-6s %-2s %-12s %-7s %s\n", demo.delta,
                  "a1,a2", "x", "p(a1,a2)", "argmin", "i(x;a_j)");
    out << buf;
    for (const auto& r : demo.rows) {
        std::snprintf(buf, sizeof buf, "%u,%-4u %-2u %-12.8f A%-6d %.3f%s\n", r.a1, r.a2, r.x,
                      r.probability, r.argmin_source, r.value, r.tie ? "  (tie)" : "");
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "I_min = %.6f%s\n", demo.average_redundancy,
                  demo.tie ? "  [argmin not unique: local values undefined]" : "");
    out << buf;
    return out.str();
}

std::string_view to_string(ProfileMeasure m)
{
    switch (m) {
    case ProfileMeasure::local_ais:
        return "local_ais";
    case ProfileMeasure::local_te_left:
        return "local_te_left";
    case ProfileMeasure::local_te_right:
        return "local_te_right";
    case ProfileMeasure::local_separable:
        return "local_separable";
    }
    return "local_ais";
}

ProfileMeasure parse_measure(std::string_view name)
{
    for (auto m : {ProfileMeasure::local_ais, ProfileMeasure::local_te_left,
                   ProfileMeasure::local_te_right, ProfileMeasure::local_separable}) {
        if (to_string(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown profile measure '" + std::string(name) + "'");
}

ProfileSet compute_local_profiles(int rule, const ExperimentConfig& config,
                                  const std::vector<std::string>& measures)
{
    ExperimentConfig cfg = config;
    cfg.rules = {rule};
    cfg.validate();
    std::vector<ProfileMeasure> parsed;
    for (const auto& m : measures) {
        parsed.push_back(parse_measure(m));
    }
    const std::array<int, 1> ks{cfg.k};
    const auto pooled = pooled_distributions(rule, cfg, ks).front();
    dynamics::InformationDynamics dyn(pooled, eca_dynamics(cfg.k));
    dyn.prepare();

    ProfileSet set{eca::run(eca::decode_rule(rule), cfg.width, cfg.steps, cfg.base_seed), {}};
    for (auto m : parsed) {
        dynamics::LocalProfile p;
        p.measure = std::string(to_string(m));
        p.k = cfg.k;
        p.width = cfg.width;
        p.first_time = cfg.k;
        p.time_count = cfg.steps - cfg.k;
        p.values.resize(static_cast<std::size_t>(p.width) * p.time_count);
        parallel_chunks(static_cast<std::size_t>(p.time_count), resolve_threads(cfg.threads),
                        [&](std::size_t begin, std::size_t end, unsigned) {
                            for (std::size_t i = begin; i < end; ++i) {
                                const int t = p.first_time + static_cast<int>(i);
                                for (int c = 0; c < p.width; ++c) {
                                    const auto obs = eca_observation(set.grid, cfg.k, t, c);
                                    double v = 0.0;
                                    switch (m) {
                                    case ProfileMeasure::local_ais:
                                        v = dyn.local_ais(obs);
                                        break;
                                    case ProfileMeasure::local_te_left:
                                        v = dyn.local_te(kLeft, {}, obs);
                                        break;
                                    case ProfileMeasure::local_te_right:
                                        v = dyn.local_te(kRight, {}, obs);
                                        break;
                                    case ProfileMeasure::local_separable:
                                        v = dyn.local_separable(obs);
                                        break;
                                    }
                                    p.at(t, c) = v;
                                }
                            }
                        });
        set.profiles.push_back(std::move(p));
    }
    return set;
}

std::vector<std::filesystem::path> export_local_profiles(int rule, const ExperimentConfig& config,
                                                         const std::vector<std::string>& measures,
                                                         const std::filesystem::path& dir)
{
    const auto set = compute_local_profiles(rule, config, measures);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto open = [&](const std::filesystem::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write " + path.string());
        }
        written.push_back(path);
        return out;
    };
    const std::string stem = "rule" + std::to_string(rule);
    {
        auto out = open(dir / (stem + "_grid.pgm"));
        eca::write_pgm(set.grid, out);
    }
    for (const auto& p : set.profiles) {
        const std::string base = stem + "_" + p.measure + "_k" + std::to_string(p.k);
        {
            auto out = open(dir / (base + ".csv"));
            dynamics::write_profile_csv(p, out);
        }
        {
            auto out = open(dir / (base + ".pgm"));
            dynamics::write_profile_pgm(p, out);
        }
    }
    return written;
}

} // namespace synpid::experiments
