#pragma once

// Partial information decomposition over the redundancy lattice, with the
// I_min redundancy measure: for each destination outcome x, the minimum over
// a node's subsets of the specific information I(X = x; A), averaged over
// p(x). PI-terms follow by Möbius inversion down the lattice.

#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "synpid/distribution.hpp"
#include "synpid/dynamics.hpp"
#include "synpid/lattice.hpp"

namespace synpid::pid {

/// Destination variables and the sources (each possibly a joint variable)
/// inside a distribution. Source i of the problem is member i+1 in lattice
/// text form.
struct PidProblem {
    VarSet target;
    std::vector<VarSet> sources;
    std::vector<std::string> source_names;
};

/// A local redundancy value, the node subset it was read from, and whether
/// that subset was chosen among tied candidates.
struct LocalRedundancy {
    double value = 0.0;
    std::size_t subset = 0;
    bool tie = false;
};

/// Redundancy measure usable for decomposition and localization.
class RedundancyMeasure {
public:
    virtual ~RedundancyMeasure() = default;

    virtual int source_count() const = 0;
    virtual double redundancy(const Antichain& node) const = 0;
    /// `observation` covers every variable of the underlying distribution.
    virtual LocalRedundancy local(const Antichain& node,
                                  std::span<const Symbol> observation) const = 0;
};

/// I_min with specific information tabulated for every source subset up
/// front. Holds its own copy of the distribution; local-MI tables are built
/// on first use (thread-safe), so the object can be shared between threads.
class Imin final : public RedundancyMeasure {
public:
    /// Two specific-information values closer than
    /// `tie_tolerance * max(1, |value|)` count as tied.
    Imin(const JointDistribution& dist, PidProblem problem, double tie_tolerance = 1e-12);

    int source_count() const override { return static_cast<int>(problem_.sources.size()); }
    const PidProblem& problem() const { return problem_; }

    /// I(X = x; A) for a destination outcome `x` (values of the target
    /// variables, in order). Throws std::domain_error when p(x) = 0.
    double specific_information(std::span<const Symbol> x, const SourceSubset& subset) const;

    double redundancy(const Antichain& node) const override;

    /// For the observed x, picks the node subset with the least specific
    /// information (lowest canonical position on ties, flagged) and returns
    /// the local MI i(x; a) of that subset's observed value.
    LocalRedundancy local(const Antichain& node,
                          std::span<const Symbol> observation) const override;

private:
    struct SubsetTable {
        std::vector<double> specific;  // indexed like outcomes_
        VarSet source_vars;
        mutable std::once_flag built;
        mutable std::unique_ptr<MutualInformation> local;
    };

    const SubsetTable& table(const SourceSubset& subset) const;
    std::size_t outcome_index(std::uint64_t x_key) const;
    std::size_t argmin(const Antichain& node, std::size_t outcome, bool& tie) const;

    PidProblem problem_;
    double tie_tolerance_;
    TupleCodec target_codec_;
    std::vector<std::pair<std::uint64_t, double>> outcomes_;  // (x key, p(x))
    std::unordered_map<std::uint64_t, std::size_t> outcome_lookup_;
    std::vector<std::unique_ptr<SubsetTable>> tables_;  // indexed by mask - 1
    JointDistribution dist_;
};

double specific_information(const JointDistribution& dist, const PidProblem& problem,
                            std::span<const Symbol> x, const SourceSubset& subset);
double i_min(const JointDistribution& dist, const PidProblem& problem, const Antichain& node);
LocalRedundancy local_i_min(const JointDistribution& dist, const PidProblem& problem,
                            const Antichain& node, std::span<const Symbol> observation);

/// Möbius inversion: I_d(a) = I_cap(a) - sum of I_d(b) over b strictly below a,
/// accumulated in the lattice's topological order.
std::vector<double> partial_terms(const RedundancyLattice& lattice, std::span<const double> i_cap);

/// Sum of PI-terms over nodes whose subsets all join two or more sources.
double modified_information(const RedundancyLattice& lattice, std::span<const double> partial);

/// Element o-1 sums PI-terms over nodes whose smallest subset has o sources.
std::vector<double> hierarchy_terms(const RedundancyLattice& lattice,
                                    std::span<const double> partial);

struct PidDecomposition {
    RedundancyLattice lattice;
    std::vector<std::string> source_names;
    std::vector<double> i_cap;
    std::vector<double> i_partial;
    double total = 0.0;
    double modified = 0.0;
    std::vector<double> hierarchy;
    int k = 0;

    double non_modified() const { return total - modified; }
    double partial(std::string_view node) const { return i_partial[lattice.index_of(node)]; }
    double redundancy(std::string_view node) const { return i_cap[lattice.index_of(node)]; }
};

PidDecomposition decompose(const RedundancyMeasure& measure,
                           std::vector<std::string> source_names = {});

/// Decomposes I(next; history, sources...) with the history as source 1 and
/// the configured sources after it, using I_min.
PidDecomposition modified_information(const JointDistribution& dist,
                                      const dynamics::DynamicsConfig& config);

/// {"sources", "nodes": [{"node", "i_cap", "i_partial"}], "total_mi",
///  "modified_information", "non_modified_information", "hierarchy"}
nlohmann::json to_json(const PidDecomposition& d);

using DistributionFamily = std::function<JointDistribution(double)>;
using MeasureFactory =
    std::function<std::unique_ptr<RedundancyMeasure>(const JointDistribution&)>;

MeasureFactory imin_factory(PidProblem problem);

struct ScanPoint {
    double parameter = 0.0;
    double average = 0.0;
    std::vector<LocalRedundancy> locals;  // one per observation
    bool tie = false;
};

struct DiscontinuityReport {
    std::string node;
    std::vector<std::vector<Symbol>> observations;
    std::vector<ScanPoint> points;
    /// Per observation, the largest change between consecutive parameters.
    std::vector<double> local_jumps;
    double max_local_jump = 0.0;
    /// Largest change of the average between consecutive parameters.
    double average_jump = 0.0;
    /// Some parameter had a tied argmin, so the local values there are not
    /// uniquely defined.
    bool non_unique = false;
};

/// Evaluates local redundancy at `node` for every supported configuration
/// across `parameters`. The family must keep the same support over the whole
/// range; throws std::invalid_argument otherwise.
DiscontinuityReport discontinuity_scan(const DistributionFamily& family,
                                       std::span<const double> parameters,
                                       const Antichain& node, const MeasureFactory& factory);

} // namespace synpid::pid
