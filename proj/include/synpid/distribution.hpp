#pragma once

// Sparse plug-in (maximum likelihood) estimation of joint distributions over
// discrete variables. Probabilities are raw relative frequencies with no bias
// correction; every information measure in the library is computed from
// these estimates. All logarithms are base 2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace synpid {

using Symbol = std::uint32_t;
using VarSet = std::vector<std::size_t>;

enum class VariableRole { destination_next, destination_history, source };

std::string_view to_string(VariableRole role);
VariableRole parse_role(std::string_view text);

struct VariableSpec {
    std::string name;
    Symbol arity = 2;
    VariableRole role = VariableRole::source;

    friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

/// Packs the k values ending at index t into one symbol of arity base^k.
/// The most recent value x[t] is the lowest digit, x[t-k+1] the highest.
Symbol embed_history(std::span<const Symbol> series, int k, std::size_t t, Symbol base = 2);

/// Inverse of embed_history: element 0 is the oldest value.
std::vector<Symbol> unpack_history(Symbol packed, int k, Symbol base = 2);

/// Mixed-radix packing of a tuple over a variable list; the last variable is
/// the lowest digit, so key order equals lexicographic tuple order.
class TupleCodec {
public:
    TupleCodec() = default;
    explicit TupleCodec(std::span<const Symbol> arities);

    std::uint64_t encode(std::span<const Symbol> tuple) const;
    /// Encodes (source[indices[0]], source[indices[1]], ...).
    std::uint64_t encode_indexed(std::span<const Symbol> source,
                                 std::span<const std::size_t> indices) const;
    void decode(std::uint64_t key, std::span<Symbol> out) const;
    std::size_t size() const { return strides_.size(); }

private:
    std::vector<Symbol> arities_;
    std::vector<std::uint64_t> strides_;
};

class JointDistribution;

/// Single-writer accumulator; call build() for an immutable distribution.
class DistributionCounter {
public:
    explicit DistributionCounter(std::vector<VariableSpec> variables);

    const std::vector<VariableSpec>& variables() const { return variables_; }

    /// Throws std::out_of_range if a symbol exceeds its variable's arity.
    void add(std::span<const Symbol> tuple, double weight = 1.0);
    void add_key(std::uint64_t key, double weight = 1.0);
    void reserve(std::size_t n) { weights_.reserve(n); }

    JointDistribution build() const;

private:
    std::vector<VariableSpec> variables_;
    TupleCodec codec_;
    std::unordered_map<std::uint64_t, double> weights_;
};

/// Immutable sparse table of nonnegative weights (counts, or exact
/// probabilities for analytic distributions) keyed by packed tuples.
class JointDistribution {
public:
    using Entry = std::pair<std::uint64_t, double>;

    JointDistribution() = default;
    /// Entries may be unsorted and contain duplicate keys (they are summed).
    JointDistribution(std::vector<VariableSpec> variables, std::vector<Entry> entries);

    /// Builds a distribution from explicit (tuple, weight) rows.
    static JointDistribution from_rows(
        std::vector<VariableSpec> variables,
        const std::vector<std::pair<std::vector<Symbol>, double>>& rows);

    const std::vector<VariableSpec>& variables() const { return variables_; }
    const TupleCodec& codec() const { return codec_; }
    /// Sorted by key, zero weights removed.
    const std::vector<Entry>& entries() const { return entries_; }

    double total() const { return total_; }
    bool empty() const { return total_ <= 0.0; }
    std::size_t support_size() const { return entries_.size(); }

    /// Throws std::out_of_range for an unknown name.
    std::size_t index_of(std::string_view name) const;
    VarSet indices_of(const std::vector<std::string>& names) const;

    double weight(std::span<const Symbol> tuple) const;
    /// Throws std::domain_error on an empty distribution.
    double probability(std::span<const Symbol> tuple) const;

    JointDistribution marginal(const VarSet& keep) const;

    std::vector<Symbol> tuple_of(std::uint64_t key) const;

    nlohmann::json to_json() const;
    /// Re-validates arity, symbol range, nonnegativity and total.
    static JointDistribution from_json(const nlohmann::json& doc);

private:
    std::vector<VariableSpec> variables_;
    TupleCodec codec_;
    std::vector<Entry> entries_;
    double total_ = 0.0;
};

template <class Range>
JointDistribution count_samples(std::vector<VariableSpec> variables, const Range& samples)
{
    DistributionCounter counter(std::move(variables));
    for (const auto& s : samples) {
        counter.add(s);
    }
    return counter.build();
}

/// Pointwise sum of weights; throws std::invalid_argument on spec mismatch.
JointDistribution merge(const JointDistribution& a, const JointDistribution& b);

/// Local and average (conditional) mutual information I(X;Y|Z) for fixed
/// disjoint variable sets, with marginal tables built once so local queries
/// are O(1).
class MutualInformation {
public:
    MutualInformation(const JointDistribution& dist, VarSet x, VarSet y, VarSet cond = {});

    /// Probability-weighted mean of local values; 0 log 0 = 0.
    double average() const { return average_; }

    /// log2 p(x|y,z) - log2 p(x|z) at an observation over all variables of
    /// the distribution. Throws std::domain_error if the configuration has
    /// zero probability.
    double local(std::span<const Symbol> observation) const;

    /// Calls f(observation_key_in_xyz, probability, local_value) for every
    /// observed (x, y, z) configuration.
    template <class F>
    void for_each_configuration(F&& f) const
    {
        for (const auto& c : configs_) {
            f(c.xyz, c.weight / total_, c.local);
        }
    }

private:
    struct Projection {
        VarSet vars;
        TupleCodec codec;
        std::uint64_t key(std::span<const Symbol> observation) const;
    };
    struct Config {
        std::uint64_t xyz;
        double weight;
        double local;
    };

    static double lookup(const std::unordered_map<std::uint64_t, double>& table,
                         std::uint64_t key);

    Projection xyz_, xz_, yz_, z_;
    std::unordered_map<std::uint64_t, double> w_xyz_, w_xz_, w_yz_, w_z_;
    std::vector<Config> configs_;
    std::size_t variable_count_ = 0;
    double total_ = 0.0;
    double average_ = 0.0;
};

/// Local MI at `observation`; a thin wrapper building a MutualInformation.
double local_mi(const JointDistribution& dist, const VarSet& x, const VarSet& y,
                const VarSet& cond, std::span<const Symbol> observation);

/// Average MI; throws std::domain_error on an empty distribution.
double avg_mi(const JointDistribution& dist, const VarSet& x, const VarSet& y,
              const VarSet& cond = {});

/// Shannon entropy of the marginal over `vars`.
double entropy(const JointDistribution& dist, const VarSet& vars);

} // namespace synpid
