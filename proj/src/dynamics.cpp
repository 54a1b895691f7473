#include "synpid/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace synpid::dynamics {

void DynamicsConfig::validate() const
{
    if (k < 1) {
        throw std::invalid_argument("history length k must be >= 1");
    }
    for (const auto& s : sources) {
        if (s == destination || s == history) {
            throw std::invalid_argument("destination variable '" + s + "' listed as a source");
        }
    }
}

InformationDynamics::InformationDynamics(const JointDistribution& dist, DynamicsConfig config)
    : dist_(&dist), config_(std::move(config))
{
    config_.validate();
    next_ = dist.index_of(config_.destination);
    history_ = dist.index_of(config_.history);
    for (const auto& s : config_.sources) {
        dist.index_of(s);
    }
}

void InformationDynamics::prepare()
{
    table("", {});
    for (const auto& s : config_.sources) {
        table(s, {});
        table(s, others(s));
    }
}

std::vector<std::string> InformationDynamics::others(const std::string& source) const
{
    std::vector<std::string> out;
    for (const auto& s : config_.sources) {
        if (s != source) {
            out.push_back(s);
        }
    }
    return out;
}

const MutualInformation& InformationDynamics::table(
    const std::string& source, const std::vector<std::string>& conditionals) const
{
    auto key = std::make_pair(source, conditionals);
    auto it = tables_.find(key);
    if (it != tables_.end()) {
        return *it->second;
    }
    std::unique_ptr<MutualInformation> mi;
    if (source.empty()) {
        mi = std::make_unique<MutualInformation>(*dist_, VarSet{history_}, VarSet{next_});
    } else {
        if (source == config_.destination || source == config_.history) {
            throw std::invalid_argument("transfer source must differ from the destination");
        }
        VarSet cond{history_};
        for (const auto& c : conditionals) {
            if (c == source) {
                throw std::invalid_argument("source '" + source + "' also listed as conditional");
            }
            if (c == config_.destination || c == config_.history) {
                throw std::invalid_argument("conditionals must exclude the destination");
            }
            cond.push_back(dist_->index_of(c));
        }
        mi = std::make_unique<MutualInformation>(*dist_, VarSet{dist_->index_of(source)},
                                                 VarSet{next_}, cond);
    }
    return *tables_.emplace(std::move(key), std::move(mi)).first->second;
}

double InformationDynamics::active_info_storage() const
{
    return table("", {}).average();
}

double InformationDynamics::local_ais(std::span<const Symbol> observation) const
{
    return table("", {}).local(observation);
}

double InformationDynamics::transfer_entropy(const std::string& source,
                                             const std::vector<std::string>& conditionals) const
{
    return table(source, conditionals).average();
}

double InformationDynamics::local_te(const std::string& source,
                                     const std::vector<std::string>& conditionals,
                                     std::span<const Symbol> observation) const
{
    return table(source, conditionals).local(observation);
}

double InformationDynamics::complete_transfer_entropy(const std::string& source) const
{
    return transfer_entropy(source, others(source));
}

double InformationDynamics::local_separable(std::span<const Symbol> observation) const
{
    double s = local_ais(observation);
    for (const auto& src : config_.sources) {
        s += local_te(src, {}, observation);
    }
    return s;
}

double InformationDynamics::joint_information() const
{
    VarSet all{history_};
    for (const auto& s : config_.sources) {
        all.push_back(dist_->index_of(s));
    }
    return avg_mi(*dist_, VarSet{next_}, all);
}

double active_info_storage(const JointDistribution& dist, const DynamicsConfig& config)
{
    return InformationDynamics(dist, config).active_info_storage();
}

double local_ais(const JointDistribution& dist, const DynamicsConfig& config, Symbol history,
                 Symbol next)
{
    InformationDynamics dyn(dist, config);
    std::vector<Symbol> obs(dist.variables().size(), 0);
    obs[dist.index_of(config.history)] = history;
    obs[dist.index_of(config.destination)] = next;
    return dyn.local_ais(obs);
}

double transfer_entropy(const JointDistribution& dist, const DynamicsConfig& config,
                        const std::string& source, const std::vector<std::string>& conditionals)
{
    return InformationDynamics(dist, config).transfer_entropy(source, conditionals);
}

double local_te(const JointDistribution& dist, const DynamicsConfig& config,
                const std::string& source, const std::vector<std::string>& conditionals,
                std::span<const Symbol> observation)
{
    return InformationDynamics(dist, config).local_te(source, conditionals, observation);
}

double local_separable(const JointDistribution& dist, const DynamicsConfig& config,
                       std::span<const Symbol> observation)
{
    return InformationDynamics(dist, config).local_separable(observation);
}

void write_profile_csv(const LocalProfile& profile, std::ostream& out)
{
    out << "cell,time,value\n";
    char buf[64];
    for (int t = profile.first_time; t < profile.first_time + profile.time_count; ++t) {
        for (int c = 0; c < profile.width; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", profile.at(t, c));
            out << c << ',' << t << ',' << buf << '\n';
        }
    }
}

void write_profile_pgm(const LocalProfile& profile, std::ostream& out)
{
    double lo = 0.0;
    double hi = 0.0;
    if (!profile.values.empty()) {
        auto [mn, mx] = std::minmax_element(profile.values.begin(), profile.values.end());
        lo = *mn;
        hi = *mx;
    }
    const double scale = hi > lo ? (hi - lo) / 65535.0 : 0.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "# value = %.17g + gray * %.17g", lo, scale);
    out << "P5\n" << buf << "\n# measure " << profile.measure << " k=" << profile.k
        << " first_time=" << profile.first_time << '\n'
        << profile.width << ' ' << profile.time_count << "\n65535\n";
    for (double v : profile.values) {
        const long g = scale > 0.0 ? std::lround((v - lo) / scale) : 0;
        const auto gray = static_cast<unsigned>(std::clamp(g, 0L, 65535L));
        out.put(static_cast<char>(gray >> 8));
        out.put(static_cast<char>(gray & 0xff));
    }
}

} // namespace synpid::dynamics
