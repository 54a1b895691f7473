#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "synpid/dynamics.hpp"
#include "synpid/eca.hpp"
#include "synpid/experiments.hpp"

using namespace synpid;
using namespace synpid::dynamics;

namespace {

// Series x with a k-step history and one source y, as (next, history, y).
JointDistribution series_distribution(const std::vector<Symbol>& x, const std::vector<Symbol>& y,
                                      int k)
{
    std::vector<VariableSpec> vars{{"next", 2, VariableRole::destination_next},
                                   {"history", 1u << k, VariableRole::destination_history},
                                   {"y", 2, VariableRole::source}};
    DistributionCounter counter(vars);
    for (std::size_t t = k; t < x.size(); ++t) {
        counter.add(std::vector<Symbol>{x[t], embed_history(x, k, t - 1), y[t - 1]});
    }
    return counter.build();
}

DynamicsConfig config_with(int k, std::vector<std::string> sources)
{
    DynamicsConfig c;
    c.k = k;
    c.sources = std::move(sources);
    return c;
}

double weighted_mean(const JointDistribution& d, const std::function<double(std::span<const Symbol>)>& f)
{
    double s = 0.0;
    for (const auto& [key, w] : d.entries()) {
        const auto obs = d.tuple_of(key);
        s += w / d.total() * f(obs);
    }
    return s;
}

} // namespace

TEST_CASE("active information storage on simple series")
{
    std::mt19937_64 gen(7);
    std::vector<Symbol> iid(4000), alt(401);
    for (auto& v : iid) {
        v = gen() & 1u;
    }
    for (std::size_t i = 0; i < alt.size(); ++i) {
        alt[i] = i % 2;
    }
    const auto cfg = config_with(1, {"y"});

    const auto d_alt = series_distribution(alt, alt, 1);
    CHECK(active_info_storage(d_alt, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(local_ais(d_alt, cfg, 0, 1) == doctest::Approx(1.0));
    CHECK(local_ais(d_alt, cfg, 1, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(local_ais(d_alt, cfg, 1, 1), std::domain_error);

    // Weighted uniform distribution of (next, history): exact independence.
    const auto uniform = JointDistribution::from_rows(
        {{"next", 2, VariableRole::destination_next},
         {"history", 2, VariableRole::destination_history},
         {"y", 2, VariableRole::source}},
        {{{0, 0, 0}, 1}, {{0, 1, 0}, 1}, {{1, 0, 0}, 1}, {{1, 1, 0}, 1}});
    CHECK(std::abs(active_info_storage(uniform, cfg)) < 1e-15);
    CHECK(std::abs(local_ais(uniform, cfg, 1, 0)) < 1e-15);

    // Plug-in estimate on an iid stream is close to zero but not exact.
    const auto d_iid = series_distribution(iid, iid, 1);
    CHECK(active_info_storage(d_iid, cfg) < 0.01);

    // Rule 204 holds every cell, so the next value copies the history.
    const auto grid = eca::run(eca::RuleTable(204), 64, 40, 3);
    const auto d204 = experiments::eca_distribution(grid, 1);
    // Next copies history, so storage equals the entropy of the next value.
    CHECK(active_info_storage(d204, experiments::eca_dynamics(1)) ==
          doctest::Approx(entropy(d204, {0})).epsilon(1e-12));
    CHECK(active_info_storage(d204, experiments::eca_dynamics(1)) > 0.99);

    auto missing = cfg;
    missing.history = "nope";
    CHECK_THROWS(active_info_storage(d_alt, missing));
}

TEST_CASE("transfer entropy on a copy system")
{
    std::mt19937_64 gen(9);
    const std::size_t n = 20000;
    std::vector<Symbol> y(n), x(n, 0);
    for (auto& v : y) {
        v = gen() & 1u;
    }
    for (std::size_t t = 1; t < n; ++t) {
        x[t] = y[t - 1];
    }
    const auto d = series_distribution(x, y, 1);
    const auto cfg = config_with(1, {"y"});
    CHECK(transfer_entropy(d, cfg, "y") == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(active_info_storage(d, cfg) < 1e-3);

    // Exact copy system: uniform y, history independent of both.
    std::vector<std::pair<std::vector<Symbol>, double>> rows;
    for (Symbol h = 0; h < 2; ++h) {
        for (Symbol s = 0; s < 2; ++s) {
            rows.push_back({{s, h, s}, 1.0});
        }
    }
    const auto exact = JointDistribution::from_rows(d.variables(), rows);
    CHECK(transfer_entropy(exact, cfg, "y") == doctest::Approx(1.0).epsilon(1e-14));
    for (const auto& [obs, w] : rows) {
        CHECK(local_te(exact, cfg, "y", {}, obs) == doctest::Approx(1.0));
        CHECK(local_separable(exact, cfg, obs) == doctest::Approx(1.0));
    }

    // Storage-only: next equals history, source irrelevant.
    rows.clear();
    for (Symbol h = 0; h < 2; ++h) {
        for (Symbol s = 0; s < 2; ++s) {
            rows.push_back({{h, h, s}, 1.0});
        }
    }
    const auto storage = JointDistribution::from_rows(d.variables(), rows);
    CHECK(std::abs(transfer_entropy(storage, cfg, "y")) < 1e-15);
    for (const auto& [obs, w] : rows) {
        CHECK(std::abs(local_te(storage, cfg, "y", {}, obs)) < 1e-15);
        CHECK(local_separable(storage, cfg, obs) == doctest::Approx(1.0));
    }

    CHECK_THROWS(transfer_entropy(d, cfg, "missing"));
    CHECK_THROWS_AS(transfer_entropy(d, cfg, "y", {"y"}), std::invalid_argument);
}

TEST_CASE("config validation")
{
    DynamicsConfig c;
    c.k = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.k = 1;
    c.sources = {"next"};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("chain rule and local means on CA distributions")
{
    for (int rule : {18, 30, 54, 110}) {
        for (int k : {1, 3, 6}) {
            const auto grid = eca::run(eca::RuleTable(rule), 80, 60, rule + k);
            const auto d = experiments::eca_distribution(grid, k);
            const auto cfg = experiments::eca_dynamics(k);
            InformationDynamics dyn(d, cfg);

            const double a = dyn.active_info_storage();
            const double joint = dyn.joint_information();
            const double forward = a + dyn.transfer_entropy("left") +
                                   dyn.transfer_entropy("right", {"left"});
            const double reverse = a + dyn.transfer_entropy("right") +
                                   dyn.transfer_entropy("left", {"right"});
            CHECK(std::abs(forward - joint) < 1e-10);
            CHECK(std::abs(reverse - joint) < 1e-10);
            CHECK(dyn.complete_transfer_entropy("left") ==
                  doctest::Approx(dyn.transfer_entropy("left", {"right"})));
            CHECK(a > -1e-12);
            CHECK(dyn.transfer_entropy("left") > -1e-12);

            CHECK(std::abs(weighted_mean(d, [&](auto o) { return dyn.local_ais(o); }) - a) < 1e-10);
            for (const std::string src : {"left", "right"}) {
                const std::string other = src == "left" ? "right" : "left";
                CHECK(std::abs(weighted_mean(d, [&](auto o) { return dyn.local_te(src, {}, o); }) -
                               dyn.transfer_entropy(src)) < 1e-10);
                CHECK(std::abs(
                          weighted_mean(d, [&](auto o) { return dyn.local_te(src, {other}, o); }) -
                          dyn.transfer_entropy(src, {other})) < 1e-10);
            }
            const double sep = weighted_mean(d, [&](auto o) { return dyn.local_separable(o); });
            CHECK(std::abs(sep - (a + dyn.transfer_entropy("left") + dyn.transfer_entropy("right"))) <
                  1e-10);
        }
    }
}

TEST_CASE("storage estimate does not decrease with k on one grid")
{
    const auto grid = eca::run(eca::RuleTable(110), 120, 120, 4);
    double prev = -1.0;
    for (int k = 1; k <= 10; ++k) {
        // Same time range for every k keeps the estimates nested.
        DistributionCounter counter(experiments::eca_variables(k));
        for (int t = 10; t < grid.steps(); ++t) {
            for (int c = 0; c < grid.width(); ++c) {
                const auto o = experiments::eca_observation(grid, k, t, c);
                counter.add(o);
            }
        }
        const double a = active_info_storage(counter.build(), experiments::eca_dynamics(k));
        CHECK(a >= prev - 1e-12);
        prev = a;
    }
}

TEST_CASE("rule 54 local storage and separable information take both signs")
{
    experiments::ExperimentConfig cfg;
    cfg.rules = {54};
    cfg.runs = 20;
    cfg.k = 8;
    const auto set = experiments::compute_local_profiles(54, cfg, {"local_ais", "local_separable"});
    REQUIRE(set.profiles.size() == 2);
    for (const auto& p : set.profiles) {
        const auto neg = std::count_if(p.values.begin(), p.values.end(), [](double v) { return v < 0; });
        const auto pos = std::count_if(p.values.begin(), p.values.end(), [](double v) { return v > 0; });
        CHECK(neg > 0);
        CHECK(pos > neg);
    }
}

TEST_CASE("profile export formats")
{
    LocalProfile p{"local_ais", 2, 3, 2, 2, {-1.0, 0.0, 1.0, 0.5, 0.25, -0.5}};
    CHECK(p.at(3, 1) == 0.25);

    std::ostringstream csv;
    write_profile_csv(p, csv);
    CHECK(csv.str().rfind("cell,time,value\n0,2,-1\n1,2,0\n2,2,1\n0,3,0.5\n", 0) == 0);

    std::ostringstream pgm;
    write_profile_pgm(p, pgm);
    const auto s = pgm.str();
    CHECK(s.rfind("P5\n# value = -1 + gray * ", 0) == 0);
    CHECK(s.find("# measure local_ais k=2 first_time=2\n3 2\n65535\n") != std::string::npos);
    const auto body = s.substr(s.size() - 12);
    auto gray = [&](int i) {
        return (static_cast<unsigned char>(body[2 * i]) << 8) | static_cast<unsigned char>(body[2 * i + 1]);
    };
    CHECK(gray(0) == 0);
    CHECK(gray(2) == 65535);
    // Decoding with the written constants recovers values to one gray step.
    const double scale = 2.0 / 65535.0;
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(-1.0 + gray(i) * scale - p.values[i]) <= scale);
    }
}
