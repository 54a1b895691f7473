#include <set>

#include "doctest.h"
#include "oracle/brute_force.hpp"
#include "synpid/lattice.hpp"

using namespace synpid::pid;

TEST_CASE("node counts match exhaustive antichain enumeration")
{
    const std::size_t expected[] = {1, 4, 18, 166};
    for (int r = 1; r <= 4; ++r) {
        const auto lat = RedundancyLattice::build(r);
        CHECK(lat.size() == expected[r - 1]);
        CHECK(lat.source_count() == r);
        if (r <= 3) {
            std::set<std::string> mine, ref;
            for (const auto& n : lat.nodes()) {
                mine.insert(n.text());
            }
            for (const auto& n : oracle::antichains(r)) {
                ref.insert(oracle::text(n));
            }
            CHECK(mine == ref);
        }
    }
    CHECK_THROWS_AS(RedundancyLattice::build(0), std::invalid_argument);
    CHECK_THROWS_AS(RedundancyLattice::build(kMaxSources + 1), std::invalid_argument);
}

TEST_CASE("two-source lattice is a diamond")
{
    const auto lat = RedundancyLattice::build(2);
    CHECK(lat.node(lat.bottom()).text() == "{1}{2}");
    CHECK(lat.node(lat.top()).text() == "{1,2}");
    std::set<std::pair<std::string, std::string>> edges;
    for (auto [lo, hi] : lat.covering_edges()) {
        edges.insert({lat.node(lo).text(), lat.node(hi).text()});
    }
    const std::set<std::pair<std::string, std::string>> want{
        {"{1}{2}", "{1}"}, {"{1}{2}", "{2}"}, {"{1}", "{1,2}"}, {"{2}", "{1,2}"}};
    CHECK(edges == want);
}

TEST_CASE("order relation is a partial order agreeing with the oracle")
{
    for (int r = 1; r <= 3; ++r) {
        const auto lat = RedundancyLattice::build(r);
        const auto n = lat.size();
        for (std::size_t a = 0; a < n; ++a) {
            CHECK(lat.leq(a, a));
            CHECK(lat.leq(lat.bottom(), a));
            CHECK(lat.leq(a, lat.top()));
            for (std::size_t b = 0; b < n; ++b) {
                if (a != b && lat.leq(a, b)) {
                    CHECK_FALSE(lat.leq(b, a));
                    CHECK(a < b);
                }
                for (std::size_t c = 0; c < n; ++c) {
                    if (lat.leq(a, b) && lat.leq(b, c)) {
                        CHECK(lat.leq(a, c));
                    }
                }
                std::vector<unsigned> lo, hi;
                for (const auto& s : lat.node(a).subsets()) {
                    lo.push_back(s.mask());
                }
                for (const auto& s : lat.node(b).subsets()) {
                    hi.push_back(s.mask());
                }
                CHECK(lat.leq(a, b) == oracle::below_or_equal(lo, hi));
                CHECK(precedes(lat.node(a), lat.node(b)) == lat.leq(a, b));
            }
            const auto& down = lat.strict_down_set(a);
            std::size_t count = 0;
            for (std::size_t b = 0; b < n; ++b) {
                count += (b != a && lat.leq(b, a)) ? 1 : 0;
            }
            CHECK(down.size() == count);
        }
        // Covering edges: strict order with nothing in between.
        for (auto [lo, hi] : lat.covering_edges()) {
            CHECK(lat.leq(lo, hi));
            CHECK(lo != hi);
            for (std::size_t m = 0; m < n; ++m) {
                if (m != lo && m != hi) {
                    CHECK_FALSE((lat.leq(lo, m) && lat.leq(m, hi)));
                }
            }
        }
    }
    CHECK(RedundancyLattice::build(3).covering_edges().size() > 0);
}

TEST_CASE("antichain text, parsing and validation")
{
    const auto a = Antichain::parse("{2,3}{1}");
    CHECK(a.text() == "{1}{2,3}");
    CHECK(a.min_subset_size() == 1);
    CHECK_FALSE(a.all_synergistic());
    CHECK(Antichain::parse("{1,2}{1,3}{2,3}").all_synergistic());
    CHECK(SourceSubset(0b101).text() == "{1,3}");
    CHECK(SourceSubset(0b101).members() == std::vector<int>{0, 2});
    CHECK(SourceSubset(0b1) < SourceSubset(0b11));
    CHECK(SourceSubset(0b11) < SourceSubset(0b10));

    CHECK_THROWS_AS(Antichain::parse("{1}{1,2}"), std::invalid_argument);
    CHECK_THROWS(Antichain::parse("{}"));
    CHECK_THROWS(Antichain::parse("1,2"));
    CHECK_THROWS(Antichain::parse(""));
    CHECK_THROWS(SourceSubset(0));

    const auto lat = RedundancyLattice::build(3);
    CHECK(lat.node(lat.index_of("{1}{2}{3}")).text() == "{1}{2}{3}");
    CHECK(lat.index_of("{1}{2}{3}") == lat.bottom());
    CHECK(lat.index_of("{1,2,3}") == lat.top());
    CHECK_THROWS_AS(lat.index_of("{1,4}"), std::out_of_range);
}
