#include "synpid/lattice.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <stdexcept>

namespace synpid::pid {

SourceSubset::SourceSubset(std::uint32_t mask)
    : mask_(mask)
{
    if (mask == 0) {
        throw std::invalid_argument("source subsets must be nonempty");
    }
}

int SourceSubset::size() const
{
    return std::popcount(mask_);
}

std::vector<int> SourceSubset::members() const
{
    std::vector<int> out;
    for (int i = 0; i < 32; ++i) {
        if (mask_ & (1u << i)) {
            out.push_back(i);
        }
    }
    return out;
}

std::string SourceSubset::text() const
{
    std::string s = "{";
    bool first = true;
    for (int m : members()) {
        if (!first) {
            s += ',';
        }
        s += std::to_string(m + 1);
        first = false;
    }
    return s + "}";
}

bool operator<(const SourceSubset& a, const SourceSubset& b)
{
    return a.members() < b.members();
}

Antichain::Antichain(std::vector<SourceSubset> subsets)
    : subsets_(std::move(subsets))
{
    if (subsets_.empty()) {
        throw std::invalid_argument("antichains must contain at least one subset");
    }
    std::sort(subsets_.begin(), subsets_.end());
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
        for (std::size_t j = 0; j < subsets_.size(); ++j) {
            if (i != j && subsets_[i].is_subset_of(subsets_[j])) {
                throw std::invalid_argument("antichain members must be pairwise incomparable");
            }
        }
    }
}

int Antichain::min_subset_size() const
{
    int m = 32;
    for (const auto& s : subsets_) {
        m = std::min(m, s.size());
    }
    return m;
}

std::string Antichain::text() const
{
    std::string s;
    for (const auto& sub : subsets_) {
        s += sub.text();
    }
    return s;
}

Antichain Antichain::parse(std::string_view text)
{
    std::vector<SourceSubset> subsets;
    std::size_t i = 0;
    auto fail = [&] {
        throw std::invalid_argument("malformed antichain '" + std::string(text) + "'");
    };
    while (i < text.size()) {
        if (text[i] != '{') {
            fail();
        }
        ++i;
        std::uint32_t mask = 0;
        while (true) {
            std::size_t start = i;
            while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
                ++i;
            }
            if (i == start || i >= text.size()) {
                fail();
            }
            const int member = std::stoi(std::string(text.substr(start, i - start)));
            if (member < 1 || member > 31) {
                fail();
            }
            mask |= 1u << (member - 1);
            if (text[i] == '}') {
                ++i;
                break;
            }
            if (text[i] != ',') {
                fail();
            }
            ++i;
        }
        subsets.emplace_back(mask);
    }
    return Antichain(std::move(subsets));
}

bool precedes(const Antichain& lower, const Antichain& upper)
{
    for (const auto& a : upper.subsets()) {
        bool covered = false;
        for (const auto& b : lower.subsets()) {
            if (b.is_subset_of(a)) {
                covered = true;
                break;
            }
        }
        if (!covered) {
            return false;
        }
    }
    return true;
}

namespace {

// Depth-first extension with subsets in increasing mask order; each
// antichain is produced exactly once.
void extend(const std::vector<std::uint32_t>& masks, std::size_t from,
            std::vector<std::uint32_t>& current, std::vector<Antichain>& out)
{
    for (std::size_t i = from; i < masks.size(); ++i) {
        const auto m = masks[i];
        bool ok = true;
        for (auto c : current) {
            if ((c & m) == c || (c & m) == m) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            continue;
        }
        current.push_back(m);
        std::vector<SourceSubset> subs(current.begin(), current.end());
        out.emplace_back(std::move(subs));
        extend(masks, i + 1, current, out);
        current.pop_back();
    }
}

} // namespace

RedundancyLattice RedundancyLattice::build(int sources)
{
    if (sources < 1 || sources > kMaxSources) {
        throw std::invalid_argument("source count must be in [1, " +
                                    std::to_string(kMaxSources) + "], got " +
                                    std::to_string(sources));
    }
    std::vector<std::uint32_t> masks((1u << sources) - 1);
    std::iota(masks.begin(), masks.end(), 1u);

    std::vector<Antichain> found;
    std::vector<std::uint32_t> current;
    extend(masks, 0, current, found);

    const std::size_t n = found.size();
    std::vector<std::vector<char>> rel(n, std::vector<char>(n, 0));
    std::vector<std::size_t> down(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rel[i][j] = precedes(found[i], found[j]);
            down[j] += rel[i][j];
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (down[a] != down[b]) {
            return down[a] < down[b];
        }
        return found[a].text() < found[b].text();
    });

    RedundancyLattice lat;
    lat.sources_ = sources;
    for (auto i : order) {
        lat.nodes_.push_back(found[i]);
    }
    lat.leq_.assign(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            lat.leq_[a][b] = rel[order[a]][order[b]];
        }
    }
    lat.below_.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t a = 0; a < n; ++a) {
            if (a != b && lat.leq_[a][b]) {
                lat.below_[b].push_back(a);
            }
        }
    }
    for (std::size_t b = 0; b < n; ++b) {
        for (auto a : lat.below_[b]) {
            bool covered = true;
            for (auto c : lat.below_[b]) {
                if (c != a && lat.leq_[a][c]) {
                    covered = false;
                    break;
                }
            }
            if (covered) {
                lat.edges_.emplace_back(a, b);
            }
        }
    }
    return lat;
}

std::size_t RedundancyLattice::index_of(const Antichain& node) const
{
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i] == node) {
            return i;
        }
    }
    throw std::out_of_range("antichain " + node.text() + " is not a lattice node");
}

bool RedundancyLattice::leq(std::size_t lower, std::size_t upper) const
{
    return leq_[lower][upper] != 0;
}

} // namespace synpid::pid
