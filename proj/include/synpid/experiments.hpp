#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "synpid/distribution.hpp"
#include "synpid/dynamics.hpp"
#include "synpid/eca.hpp"
#include "synpid/pid.hpp"

namespace synpid::experiments {

struct ExperimentConfig {
    std::vector<int> rules{18, 22, 30, 54, 110};
    int runs = 100;
    int width = 200;
    int steps = 200;
    int k = 16;
    std::uint64_t base_seed = 1;
    /// 0 means hardware concurrency.
    unsigned threads = 0;

    void validate() const;
};

// ECA samples pair a cell's next value with its own k-step history and the
// previous values of its left and right neighbours. Time steps before k have
// no full history and are skipped; all cells feed one pooled distribution.

/// Variables (next, history, left, right).
std::vector<VariableSpec> eca_variables(int k);
dynamics::DynamicsConfig eca_dynamics(int k);

/// Observation for destination cell `cell` at time `time` (time >= k).
std::array<Symbol, 4> eca_observation(const eca::SpacetimeGrid& grid, int k, int time, int cell);

/// Adds every (time >= k, cell) sample of `grid` to `counter`.
void count_eca_samples(const eca::SpacetimeGrid& grid, int k, DistributionCounter& counter);
JointDistribution eca_distribution(const eca::SpacetimeGrid& grid, int k);

/// One pooled distribution per entry of `ks`, over config.runs runs seeded
/// base_seed + i. Runs are simulated in parallel; the result does not depend
/// on the thread count.
std::vector<JointDistribution> pooled_distributions(int rule, const ExperimentConfig& config,
                                                    std::span<const int> ks);

struct DecompositionSummary {
    int k = 0;
    double samples = 0.0;
    double total_mi = 0.0;
    std::vector<double> hierarchy;
    double modified = 0.0;
};

struct RuleReport {
    int rule = 0;
    DecompositionSummary at_k;
    DecompositionSummary at_k1;
    std::uint64_t first_seed = 0;
    std::uint64_t last_seed = 0;
};

struct TableReport {
    ExperimentConfig config;
    std::vector<RuleReport> rules;
};

DecompositionSummary summarize(const pid::PidDecomposition& d, double samples);

/// Three-source decomposition {history, left, right} of each rule's next
/// value at config.k and at k = 1.
TableReport run_table1(const ExperimentConfig& config);
nlohmann::json to_json(const TableReport& report);
/// Aligned plain-text table, values to 3 decimals.
std::string format_table(const TableReport& report);

/// OR gate x = a1 OR a2 with p(a1, a2) = (1/4, 1/4 + delta, 1/4 - delta, 1/4).
/// Variables (x, a1, a2). Throws std::invalid_argument unless |delta| < 1/4.
JointDistribution or_distribution(double delta);
pid::PidProblem or_problem();

struct OrRow {
    Symbol a1 = 0;
    Symbol a2 = 0;
    Symbol x = 0;
    double probability = 0.0;
    int argmin_source = 1;  // 1 = A1, 2 = A2
    double value = 0.0;
    bool tie = false;
};

struct OrDemo {
    double delta = 0.0;
    std::vector<OrRow> rows;
    double average_redundancy = 0.0;
    bool tie = false;
};

/// Local redundancy i_min(x; {a1}{a2}) for each row of the OR truth table.
OrDemo run_or_demo(double delta);
nlohmann::json to_json(const OrDemo& demo);
std::string format_or_demo(const OrDemo& demo);

enum class ProfileMeasure { local_ais, local_te_left, local_te_right, local_separable };

std::string_view to_string(ProfileMeasure m);
/// Throws std::invalid_argument for an unknown name.
ProfileMeasure parse_measure(std::string_view name);

struct ProfileSet {
    eca::SpacetimeGrid grid;
    std::vector<dynamics::LocalProfile> profiles;
};

/// Local values over run 0 (seed base_seed), with probabilities from the
/// distribution pooled over all config.runs runs.
ProfileSet compute_local_profiles(int rule, const ExperimentConfig& config,
                                  const std::vector<std::string>& measures);

/// Writes rule<R>_<measure>_k<K>.csv/.pgm per measure plus rule<R>_grid.pgm
/// into `dir` and returns the written paths.
std::vector<std::filesystem::path> export_local_profiles(int rule, const ExperimentConfig& config,
                                                         const std::vector<std::string>& measures,
                                                         const std::filesystem::path& dir);

} // namespace synpid::experiments
