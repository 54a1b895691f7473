#include "synpid/pid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

namespace synpid::pid {

namespace {

VarSet subset_variables(const PidProblem& problem, const SourceSubset& subset)
{
    VarSet vars;
    for (int m : subset.members()) {
        if (m >= static_cast<int>(problem.sources.size())) {
            throw std::out_of_range("subset " + subset.text() + " names an undeclared source");
        }
        const auto& src = problem.sources[m];
        vars.insert(vars.end(), src.begin(), src.end());
    }
    return vars;
}

void validate(const JointDistribution& dist, const PidProblem& problem)
{
    if (dist.empty()) {
        throw std::domain_error("decomposition of an empty distribution");
    }
    if (problem.target.empty()) {
        throw std::invalid_argument("decomposition needs a destination variable");
    }
    const int r = static_cast<int>(problem.sources.size());
    if (r < 1 || r > kMaxSources) {
        throw std::invalid_argument("source count must be in [1, " +
                                    std::to_string(kMaxSources) + "]");
    }
    std::vector<int> used(dist.variables().size(), 0);
    auto mark = [&](const VarSet& vars) {
        for (auto v : vars) {
            if (v >= used.size()) {
                throw std::out_of_range("variable index out of range");
            }
            if (used[v]++) {
                throw std::invalid_argument("destination and sources must be disjoint");
            }
        }
    };
    mark(problem.target);
    for (const auto& s : problem.sources) {
        if (s.empty()) {
            throw std::invalid_argument("sources must be nonempty");
        }
        mark(s);
    }
}

} // namespace

Imin::Imin(const JointDistribution& dist, PidProblem problem, double tie_tolerance)
    : problem_(std::move(problem)), tie_tolerance_(tie_tolerance), dist_(dist)
{
    validate(dist, problem_);
    const int r = source_count();
    const std::size_t nt = problem_.target.size();

    std::vector<Symbol> target_arities;
    for (auto v : problem_.target) {
        target_arities.push_back(dist.variables()[v].arity);
    }
    target_codec_ = TupleCodec(target_arities);

    const auto target_marginal = dist.marginal(problem_.target);
    const double total = dist.total();
    for (const auto& [key, w] : target_marginal.entries()) {
        outcome_lookup_.emplace(key, outcomes_.size());
        outcomes_.emplace_back(key, w / total);
    }

    tables_.resize((1u << r) - 1);
    for (auto& t : tables_) {
        t = std::make_unique<SubsetTable>();
    }
    std::vector<Symbol> tuple;
    for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
        const SourceSubset subset(mask);
        const VarSet source_vars = subset_variables(problem_, subset);
        VarSet vars = problem_.target;
        vars.insert(vars.end(), source_vars.begin(), source_vars.end());
        const auto joint = dist.marginal(vars);

        std::vector<Symbol> source_arities;
        for (auto v : source_vars) {
            source_arities.push_back(dist.variables()[v].arity);
        }
        const TupleCodec source_codec(source_arities);
        VarSet target_pos(nt);
        VarSet source_pos(source_vars.size());
        for (std::size_t i = 0; i < nt; ++i) {
            target_pos[i] = i;
        }
        for (std::size_t i = 0; i < source_vars.size(); ++i) {
            source_pos[i] = nt + i;
        }

        tuple.resize(vars.size());
        std::unordered_map<std::uint64_t, double> source_weight;
        for (const auto& [key, w] : joint.entries()) {
            joint.codec().decode(key, tuple);
            source_weight[source_codec.encode_indexed(tuple, source_pos)] += w;
        }

        // I(X = x; A) = sum_a p(a|x) log2(p(x|a) / p(x))
        auto& spec = tables_[mask - 1]->specific;
        spec.assign(outcomes_.size(), 0.0);
        for (const auto& [key, w] : joint.entries()) {
            joint.codec().decode(key, tuple);
            const auto xi = outcome_index(target_codec_.encode_indexed(tuple, target_pos));
            const double px = outcomes_[xi].second;
            const double wx = px * total;
            const double wa = source_weight[source_codec.encode_indexed(tuple, source_pos)];
            spec[xi] += (w / wx) * std::log2((w / wa) / px);
        }
        tables_[mask - 1]->source_vars = source_vars;
    }
}

std::size_t Imin::outcome_index(std::uint64_t x_key) const
{
    auto it = outcome_lookup_.find(x_key);
    if (it == outcome_lookup_.end()) {
        throw std::domain_error("destination outcome has zero probability");
    }
    return it->second;
}

const Imin::SubsetTable& Imin::table(const SourceSubset& subset) const
{
    if (subset.mask() >= (1u << source_count())) {
        throw std::out_of_range("subset " + subset.text() + " names an undeclared source");
    }
    return *tables_[subset.mask() - 1];
}

double Imin::specific_information(std::span<const Symbol> x, const SourceSubset& subset) const
{
    return table(subset).specific[outcome_index(target_codec_.encode(x))];
}

std::size_t Imin::argmin(const Antichain& node, std::size_t outcome, bool& tie) const
{
    const auto& subsets = node.subsets();
    std::size_t best = 0;
    double best_value = table(subsets[0]).specific[outcome];
    for (std::size_t j = 1; j < subsets.size(); ++j) {
        const double v = table(subsets[j]).specific[outcome];
        if (v < best_value) {
            best_value = v;
            best = j;
        }
    }
    tie = false;
    const double tol = tie_tolerance_ * std::max(1.0, std::abs(best_value));
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (j != best && std::abs(table(subsets[j]).specific[outcome] - best_value) <= tol) {
            tie = true;
            // Ties resolve to the lowest canonical position.
            best = std::min(best, j);
        }
    }
    return best;
}

double Imin::redundancy(const Antichain& node) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < outcomes_.size(); ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& s : node.subsets()) {
            m = std::min(m, table(s).specific[i]);
        }
        sum += outcomes_[i].second * m;
    }
    return sum;
}

LocalRedundancy Imin::local(const Antichain& node, std::span<const Symbol> observation) const
{
    const auto xi = outcome_index(target_codec_.encode_indexed(observation, problem_.target));
    LocalRedundancy out;
    out.subset = argmin(node, xi, out.tie);
    const auto& t = table(node.subsets()[out.subset]);
    std::call_once(t.built, [&] {
        t.local = std::make_unique<MutualInformation>(dist_, problem_.target, t.source_vars);
    });
    out.value = t.local->local(observation);
    return out;
}

double specific_information(const JointDistribution& dist, const PidProblem& problem,
                            std::span<const Symbol> x, const SourceSubset& subset)
{
    return Imin(dist, problem).specific_information(x, subset);
}

double i_min(const JointDistribution& dist, const PidProblem& problem, const Antichain& node)
{
    return Imin(dist, problem).redundancy(node);
}

LocalRedundancy local_i_min(const JointDistribution& dist, const PidProblem& problem,
                            const Antichain& node, std::span<const Symbol> observation)
{
    return Imin(dist, problem).local(node, observation);
}

std::vector<double> partial_terms(const RedundancyLattice& lattice, std::span<const double> i_cap)
{
    if (i_cap.size() != lattice.size()) {
        throw std::invalid_argument("one redundancy value per lattice node required");
    }
    std::vector<double> partial(lattice.size(), 0.0);
    for (std::size_t a = 0; a < lattice.size(); ++a) {
        double below = 0.0;
        for (auto b : lattice.strict_down_set(a)) {
            below += partial[b];
        }
        partial[a] = i_cap[a] - below;
    }
    return partial;
}

double modified_information(const RedundancyLattice& lattice, std::span<const double> partial)
{
    double m = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        if (lattice.node(i).all_synergistic()) {
            m += partial[i];
        }
    }
    return m;
}

std::vector<double> hierarchy_terms(const RedundancyLattice& lattice,
                                    std::span<const double> partial)
{
    std::vector<double> h(static_cast<std::size_t>(lattice.source_count()), 0.0);
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        h[lattice.node(i).min_subset_size() - 1] += partial[i];
    }
    return h;
}

PidDecomposition decompose(const RedundancyMeasure& measure, std::vector<std::string> source_names)
{
    PidDecomposition d{RedundancyLattice::build(measure.source_count()), std::move(source_names),
                       {}, {}, 0.0, 0.0, {}, 0};
    d.i_cap.reserve(d.lattice.size());
    for (const auto& node : d.lattice.nodes()) {
        d.i_cap.push_back(measure.redundancy(node));
    }
    d.i_partial = partial_terms(d.lattice, d.i_cap);
    d.total = d.i_cap[d.lattice.top()];
    d.modified = modified_information(d.lattice, d.i_partial);
    d.hierarchy = hierarchy_terms(d.lattice, d.i_partial);
    return d;
}

PidDecomposition modified_information(const JointDistribution& dist,
                                      const dynamics::DynamicsConfig& config)
{
    config.validate();
    PidProblem problem;
    problem.target = {dist.index_of(config.destination)};
    problem.sources.push_back({dist.index_of(config.history)});
    problem.source_names.push_back(config.history);
    for (const auto& s : config.sources) {
        problem.sources.push_back({dist.index_of(s)});
        problem.source_names.push_back(s);
    }
    auto names = problem.source_names;
    auto d = decompose(Imin(dist, std::move(problem)), std::move(names));
    d.k = config.k;
    return d;
}

nlohmann::json to_json(const PidDecomposition& d)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < d.lattice.size(); ++i) {
        nodes.push_back({{"node", d.lattice.node(i).text()},
                         {"i_cap", d.i_cap[i]},
                         {"i_partial", d.i_partial[i]}});
    }
    nlohmann::json out{{"sources", d.source_names},
                       {"nodes", nodes},
                       {"total_mi", d.total},
                       {"modified_information", d.modified},
                       {"non_modified_information", d.non_modified()},
                       {"hierarchy", d.hierarchy}};
    if (d.k > 0) {
        out["k"] = d.k;
    }
    return out;
}

MeasureFactory imin_factory(PidProblem problem)
{
    return [problem = std::move(problem)](const JointDistribution& dist) {
        return std::unique_ptr<RedundancyMeasure>(std::make_unique<Imin>(dist, problem));
    };
}

DiscontinuityReport discontinuity_scan(const DistributionFamily& family,
                                       std::span<const double> parameters,
                                       const Antichain& node, const MeasureFactory& factory)
{
    if (parameters.empty()) {
        throw std::invalid_argument("discontinuity scan needs at least one parameter value");
    }
    DiscontinuityReport report;
    report.node = node.text();
    std::vector<std::uint64_t> support;
    for (double param : parameters) {
        const auto dist = family(param);
        std::vector<std::uint64_t> keys;
        for (const auto& e : dist.entries()) {
            keys.push_back(e.first);
        }
        if (report.points.empty()) {
            support = keys;
            for (auto k : keys) {
                report.observations.push_back(dist.tuple_of(k));
            }
        } else if (keys != support) {
            throw std::invalid_argument("distribution support changes across the parameter range");
        }
        const auto measure = factory(dist);
        ScanPoint point;
        point.parameter = param;
        point.average = measure->redundancy(node);
        for (const auto& obs : report.observations) {
            point.locals.push_back(measure->local(node, obs));
            point.tie = point.tie || point.locals.back().tie;
        }
        report.non_unique = report.non_unique || point.tie;
        report.points.push_back(std::move(point));
    }
    report.local_jumps.assign(report.observations.size(), 0.0);
    for (std::size_t p = 1; p < report.points.size(); ++p) {
        const auto& a = report.points[p - 1];
        const auto& b = report.points[p];
        report.average_jump = std::max(report.average_jump, std::abs(b.average - a.average));
        for (std::size_t o = 0; o < report.observations.size(); ++o) {
            report.local_jumps[o] =
                std::max(report.local_jumps[o], std::abs(b.locals[o].value - a.locals[o].value));
        }
    }
    for (double j : report.local_jumps) {
        report.max_local_jump = std::max(report.max_local_jump, j);
    }
    return report;
}

} // namespace synpid::pid
