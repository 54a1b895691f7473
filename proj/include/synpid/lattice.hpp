#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace synpid::pid {

/// Largest source count the lattice builder accepts (r = 4 has 166 nodes).
inline constexpr int kMaxSources = 4;

/// Nonempty set of source indices, treated as one joint variable. Bit i of
/// the mask is source i (0-based); text form is 1-based, e.g. "{1,3}".
class SourceSubset {
public:
    explicit SourceSubset(std::uint32_t mask);

    std::uint32_t mask() const { return mask_; }
    int size() const;
    std::vector<int> members() const;
    bool is_subset_of(const SourceSubset& other) const { return (mask_ & ~other.mask_) == 0; }
    std::string text() const;

    friend bool operator==(const SourceSubset&, const SourceSubset&) = default;
    /// Lexicographic on the sorted member lists.
    friend bool operator<(const SourceSubset& a, const SourceSubset& b);

private:
    std::uint32_t mask_;
};

/// Collection of pairwise incomparable subsets, kept in canonical order.
class Antichain {
public:
    /// Throws std::invalid_argument if empty or if one subset contains another.
    explicit Antichain(std::vector<SourceSubset> subsets);

    const std::vector<SourceSubset>& subsets() const { return subsets_; }
    int min_subset_size() const;
    /// True when every subset joins at least two sources.
    bool all_synergistic() const { return min_subset_size() > 1; }
    std::string text() const;

    /// Parses "{1}{2,3}" (1-based members).
    static Antichain parse(std::string_view text);

    friend bool operator==(const Antichain&, const Antichain&) = default;

private:
    std::vector<SourceSubset> subsets_;
};

/// lower ⪯ upper iff every subset of `upper` contains some subset of `lower`.
bool precedes(const Antichain& lower, const Antichain& upper);

/// All antichains of nonempty subsets of r sources under ⪯.
class RedundancyLattice {
public:
    /// Throws std::invalid_argument for r < 1 or r > kMaxSources.
    static RedundancyLattice build(int sources);

    int source_count() const { return sources_; }
    std::size_t size() const { return nodes_.size(); }
    const Antichain& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Antichain>& nodes() const { return nodes_; }

    /// Throws std::out_of_range if absent.
    std::size_t index_of(const Antichain& node) const;
    std::size_t index_of(std::string_view text) const { return index_of(Antichain::parse(text)); }

    bool leq(std::size_t lower, std::size_t upper) const;
    /// Indices strictly below node i.
    const std::vector<std::size_t>& strict_down_set(std::size_t i) const { return below_[i]; }
    /// Hasse diagram edges (lower, upper).
    const std::vector<std::pair<std::size_t, std::size_t>>& covering_edges() const
    {
        return edges_;
    }

    std::size_t bottom() const { return 0; }
    std::size_t top() const { return nodes_.size() - 1; }

private:
    int sources_ = 0;
    // Sorted by down-set size, so index order is a topological order.
    std::vector<Antichain> nodes_;
    std::vector<std::vector<std::size_t>> below_;
    std::vector<std::vector<char>> leq_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

} // namespace synpid::pid
