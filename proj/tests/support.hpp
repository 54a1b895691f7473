#pragma once

#include <random>
#include <string>
#include <vector>

#include "oracle/brute_force.hpp"
#include "synpid/distribution.hpp"

namespace test_support {

/// Library distribution over (x, a1..ar) holding the dense table's
/// probabilities as weights.
inline synpid::JointDistribution to_joint(const oracle::DenseTable& t)
{
    std::vector<synpid::VariableSpec> vars;
    for (std::size_t i = 0; i < t.arities.size(); ++i) {
        vars.push_back({i == 0 ? "x" : "a" + std::to_string(i),
                        static_cast<synpid::Symbol>(t.arities[i]),
                        i == 0 ? synpid::VariableRole::destination_next
                               : synpid::VariableRole::source});
    }
    std::vector<std::pair<std::vector<synpid::Symbol>, double>> rows;
    for (std::size_t i = 0; i < t.p.size(); ++i) {
        const auto v = t.decode(i);
        rows.emplace_back(std::vector<synpid::Symbol>(v.begin(), v.end()), t.p[i]);
    }
    return synpid::JointDistribution::from_rows(vars, rows);
}

/// Two independent uniform bits a1, a2 and x = f(a1, a2) with arity `x_arity`.
template <class F>
oracle::DenseTable gate(F f, int x_arity = 2)
{
    oracle::DenseTable t{{x_arity, 2, 2}, std::vector<double>(x_arity * 4, 0.0)};
    for (int a1 = 0; a1 < 2; ++a1) {
        for (int a2 = 0; a2 < 2; ++a2) {
            const int x = f(a1, a2);
            t.p[(x * 2 + a1) * 2 + a2] += 0.25;
        }
    }
    return t;
}

/// Conditional MI by the entropy identity H(XZ) + H(YZ) - H(Z) - H(XYZ).
inline double cmi_by_entropies(const synpid::JointDistribution& d, const synpid::VarSet& x,
                               const synpid::VarSet& y, const synpid::VarSet& z)
{
    auto h = [&](synpid::VarSet v) {
        if (v.empty()) {
            return 0.0;
        }
        const auto m = d.marginal(v);
        double s = 0.0;
        for (const auto& [k, w] : m.entries()) {
            const double p = w / m.total();
            s -= p * std::log2(p);
        }
        return s;
    };
    auto cat = [](synpid::VarSet a, const synpid::VarSet& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return h(cat(x, z)) + h(cat(y, z)) - h(z) - h(cat(cat(x, y), z));
}

} // namespace test_support
