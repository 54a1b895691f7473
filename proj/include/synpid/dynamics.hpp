#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "synpid/distribution.hpp"

namespace synpid::dynamics {

/// Names the destination's next value, its packed k-step history and the
/// causal sources inside a JointDistribution.
struct DynamicsConfig {
    int k = 1;
    std::string destination = "next";
    std::string history = "history";
    std::vector<std::string> sources;

    /// Throws std::invalid_argument on k < 1 or a destination listed as a source.
    void validate() const;
};

/// Storage, transfer and separable information over one distribution.
///
/// Conditional MI tables are built lazily per (source, conditionals) pair and
/// kept for the evaluator's lifetime, so local queries over many observations
/// are cheap. Not thread-safe while tables are still being built; call
/// prepare() first when sharing across threads.
class InformationDynamics {
public:
    InformationDynamics(const JointDistribution& dist, DynamicsConfig config);

    const DynamicsConfig& config() const { return config_; }
    const JointDistribution& distribution() const { return *dist_; }

    /// Builds every table used by the local_* queries below.
    void prepare();

    double active_info_storage() const;
    double local_ais(std::span<const Symbol> observation) const;

    /// I(source; next | history, conditionals). Empty conditionals give the
    /// apparent TE; all other sources give the complete TE.
    double transfer_entropy(const std::string& source,
                            const std::vector<std::string>& conditionals = {}) const;
    double local_te(const std::string& source, const std::vector<std::string>& conditionals,
                    std::span<const Symbol> observation) const;

    double complete_transfer_entropy(const std::string& source) const;

    /// Local AIS plus the apparent local TE of every configured source. This
    /// is a heuristic for spotting modification events, not an information
    /// measure in its own right: it double-counts redundancy and ignores
    /// synergy between sources.
    double local_separable(std::span<const Symbol> observation) const;

    /// I(next; history, sources...) over all configured sources jointly.
    double joint_information() const;

private:
    const MutualInformation& table(const std::string& source,
                                   const std::vector<std::string>& conditionals) const;
    std::vector<std::string> others(const std::string& source) const;

    const JointDistribution* dist_;
    DynamicsConfig config_;
    std::size_t next_ = 0;
    std::size_t history_ = 0;
    mutable std::map<std::pair<std::string, std::vector<std::string>>,
                     std::unique_ptr<MutualInformation>>
        tables_;
};

double active_info_storage(const JointDistribution& dist, const DynamicsConfig& config);
/// Local AIS for a (history, next) pair.
double local_ais(const JointDistribution& dist, const DynamicsConfig& config, Symbol history,
                 Symbol next);
double transfer_entropy(const JointDistribution& dist, const DynamicsConfig& config,
                        const std::string& source,
                        const std::vector<std::string>& conditionals = {});
double local_te(const JointDistribution& dist, const DynamicsConfig& config,
                const std::string& source, const std::vector<std::string>& conditionals,
                std::span<const Symbol> observation);
double local_separable(const JointDistribution& dist, const DynamicsConfig& config,
                       std::span<const Symbol> observation);

/// Local values of one measure over a (time, cell) field, starting at time
/// `first_time` (earlier steps lack a full history).
struct LocalProfile {
    std::string measure;
    int k = 1;
    int width = 0;
    int first_time = 0;
    int time_count = 0;
    std::vector<double> values;

    double at(int time, int cell) const
    {
        return values[static_cast<std::size_t>(time - first_time) * width + cell];
    }
    double& at(int time, int cell)
    {
        return values[static_cast<std::size_t>(time - first_time) * width + cell];
    }
};

/// "cell,time,value" rows, time-major.
void write_profile_csv(const LocalProfile& profile, std::ostream& out);

/// 16-bit binary PGM (P5, maxval 65535, big-endian), one row per time step.
/// Gray level g maps back to a value as `lo + g * scale`; both constants are
/// written into a "# value = lo + gray * scale" comment line.
void write_profile_pgm(const LocalProfile& profile, std::ostream& out);

} // namespace synpid::dynamics
