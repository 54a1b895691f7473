#include "synpid/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace synpid {

namespace {

constexpr int kSnapshotVersion = 1;

std::vector<Symbol> arities_of(const std::vector<VariableSpec>& vars, const VarSet& keep)
{
    std::vector<Symbol> out;
    out.reserve(keep.size());
    for (auto i : keep) {
        out.push_back(vars.at(i).arity);
    }
    return out;
}

std::vector<Symbol> arities_of(const std::vector<VariableSpec>& vars)
{
    std::vector<Symbol> out;
    for (const auto& v : vars) {
        out.push_back(v.arity);
    }
    return out;
}

void validate_variables(const std::vector<VariableSpec>& vars)
{
    for (const auto& v : vars) {
        if (v.arity < 2) {
            throw std::invalid_argument("variable '" + v.name + "' must have arity >= 2");
        }
    }
}

} // namespace

std::string_view to_string(VariableRole role)
{
    switch (role) {
    case VariableRole::destination_next:
        return "destination-next";
    case VariableRole::destination_history:
        return "destination-history";
    case VariableRole::source:
        return "source";
    }
    return "source";
}

VariableRole parse_role(std::string_view text)
{
    if (text == "destination-next") {
        return VariableRole::destination_next;
    }
    if (text == "destination-history") {
        return VariableRole::destination_history;
    }
    if (text == "source") {
        return VariableRole::source;
    }
    throw std::invalid_argument("unknown variable role '" + std::string(text) + "'");
}

Symbol embed_history(std::span<const Symbol> series, int k, std::size_t t, Symbol base)
{
    if (k < 1) {
        throw std::invalid_argument("history length k must be >= 1");
    }
    if (t + 1 < static_cast<std::size_t>(k)) {
        throw std::out_of_range("insufficient history: need t >= k - 1");
    }
    if (t >= series.size()) {
        throw std::out_of_range("history index past end of series");
    }
    if (std::pow(static_cast<double>(base), k) > std::numeric_limits<Symbol>::max()) {
        throw std::overflow_error("history arity base^k does not fit a symbol");
    }
    Symbol packed = 0;
    Symbol scale = 1;
    for (int j = 0; j < k; ++j) {
        const Symbol v = series[t - j];
        if (v >= base) {
            throw std::out_of_range("series value exceeds alphabet base");
        }
        packed += v * scale;
        scale *= base;
    }
    return packed;
}

std::vector<Symbol> unpack_history(Symbol packed, int k, Symbol base)
{
    std::vector<Symbol> out(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        out[k - 1 - j] = packed % base;
        packed /= base;
    }
    return out;
}

TupleCodec::TupleCodec(std::span<const Symbol> arities)
    : arities_(arities.begin(), arities.end()), strides_(arities.size())
{
    std::uint64_t stride = 1;
    for (std::size_t i = arities_.size(); i-- > 0;) {
        strides_[i] = stride;
        if (arities_[i] != 0 &&
            stride > std::numeric_limits<std::uint64_t>::max() / arities_[i]) {
            throw std::overflow_error("joint state space exceeds 64-bit keys");
        }
        stride *= arities_[i];
    }
}

std::uint64_t TupleCodec::encode(std::span<const Symbol> tuple) const
{
    if (tuple.size() != strides_.size()) {
        throw std::invalid_argument("tuple length does not match variable count");
    }
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        if (tuple[i] >= arities_[i]) {
            throw std::out_of_range("symbol " + std::to_string(tuple[i]) +
                                    " out of range for arity " + std::to_string(arities_[i]));
        }
        key += tuple[i] * strides_[i];
    }
    return key;
}

std::uint64_t TupleCodec::encode_indexed(std::span<const Symbol> source,
                                         std::span<const std::size_t> indices) const
{
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const Symbol v = source[indices[i]];
        if (v >= arities_[i]) {
            throw std::out_of_range("symbol " + std::to_string(v) + " out of range for arity " +
                                    std::to_string(arities_[i]));
        }
        key += v * strides_[i];
    }
    return key;
}

void TupleCodec::decode(std::uint64_t key, std::span<Symbol> out) const
{
    for (std::size_t i = 0; i < strides_.size(); ++i) {
        out[i] = static_cast<Symbol>(key / strides_[i]);
        key %= strides_[i];
    }
}

DistributionCounter::DistributionCounter(std::vector<VariableSpec> variables)
    : variables_(std::move(variables))
{
    validate_variables(variables_);
    codec_ = TupleCodec(arities_of(variables_));
}

void DistributionCounter::add(std::span<const Symbol> tuple, double weight)
{
    weights_[codec_.encode(tuple)] += weight;
}

void DistributionCounter::add_key(std::uint64_t key, double weight)
{
    weights_[key] += weight;
}

JointDistribution DistributionCounter::build() const
{
    return JointDistribution(variables_, {weights_.begin(), weights_.end()});
}

JointDistribution::JointDistribution(std::vector<VariableSpec> variables,
                                     std::vector<Entry> entries)
    : variables_(std::move(variables))
{
    validate_variables(variables_);
    codec_ = TupleCodec(arities_of(variables_));
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    for (const auto& [key, w] : entries) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weights must be finite and nonnegative");
        }
        if (w == 0.0) {
            continue;
        }
        if (!entries_.empty() && entries_.back().first == key) {
            entries_.back().second += w;
        } else {
            entries_.emplace_back(key, w);
        }
    }
    // Summation in key order keeps totals bit-identical however the entries
    // were produced.
    for (const auto& e : entries_) {
        total_ += e.second;
    }
}

JointDistribution JointDistribution::from_rows(
    std::vector<VariableSpec> variables,
    const std::vector<std::pair<std::vector<Symbol>, double>>& rows)
{
    TupleCodec codec(arities_of(variables));
    std::vector<Entry> entries;
    entries.reserve(rows.size());
    for (const auto& [tuple, w] : rows) {
        entries.emplace_back(codec.encode(tuple), w);
    }
    return JointDistribution(std::move(variables), std::move(entries));
}

std::size_t JointDistribution::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i].name == name) {
            return i;
        }
    }
    throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

VarSet JointDistribution::indices_of(const std::vector<std::string>& names) const
{
    VarSet out;
    for (const auto& n : names) {
        out.push_back(index_of(n));
    }
    return out;
}

double JointDistribution::weight(std::span<const Symbol> tuple) const
{
    const auto key = codec_.encode(tuple);
    auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                               [](const Entry& e, std::uint64_t k) { return e.first < k; });
    return (it != entries_.end() && it->first == key) ? it->second : 0.0;
}

double JointDistribution::probability(std::span<const Symbol> tuple) const
{
    if (empty()) {
        throw std::domain_error("probability query on an empty distribution");
    }
    return weight(tuple) / total_;
}

JointDistribution JointDistribution::marginal(const VarSet& keep) const
{
    std::vector<VariableSpec> vars;
    for (auto i : keep) {
        vars.push_back(variables_.at(i));
    }
    TupleCodec sub(arities_of(variables_, keep));
    std::unordered_map<std::uint64_t, double> acc;
    std::vector<Symbol> full(variables_.size());
    for (const auto& [key, w] : entries_) {
        codec_.decode(key, full);
        acc[sub.encode_indexed(full, keep)] += w;
    }
    return JointDistribution(std::move(vars), {acc.begin(), acc.end()});
}

std::vector<Symbol> JointDistribution::tuple_of(std::uint64_t key) const
{
    std::vector<Symbol> out(variables_.size());
    codec_.decode(key, out);
    return out;
}

nlohmann::json JointDistribution::to_json() const
{
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& v : variables_) {
        vars.push_back({{"name", v.name}, {"arity", v.arity}, {"role", to_string(v.role)}});
    }
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& [key, w] : entries_) {
        counts.push_back(nlohmann::json::array({tuple_of(key), w}));
    }
    return {{"version", kSnapshotVersion}, {"variables", vars}, {"counts", counts},
            {"total", total_}};
}

JointDistribution JointDistribution::from_json(const nlohmann::json& doc)
{
    if (doc.value("version", 0) != kSnapshotVersion) {
        throw std::invalid_argument("unsupported distribution snapshot version");
    }
    std::vector<VariableSpec> vars;
    for (const auto& v : doc.at("variables")) {
        vars.push_back({v.at("name").get<std::string>(), v.at("arity").get<Symbol>(),
                        parse_role(v.at("role").get<std::string>())});
    }
    validate_variables(vars);
    std::vector<std::pair<std::vector<Symbol>, double>> rows;
    for (const auto& row : doc.at("counts")) {
        if (!row.is_array() || row.size() != 2) {
            throw std::invalid_argument("count entries must be [tuple, count] pairs");
        }
        auto tuple = row[0].get<std::vector<Symbol>>();
        if (tuple.size() != vars.size()) {
            throw std::invalid_argument("tuple length does not match variable count");
        }
        rows.emplace_back(std::move(tuple), row[1].get<double>());
    }
    auto dist = from_rows(std::move(vars), rows);
    const double stated = doc.at("total").get<double>();
    if (std::abs(stated - dist.total()) > 1e-9 * std::max(1.0, stated)) {
        throw std::invalid_argument("snapshot total does not equal the sum of counts");
    }
    return dist;
}

JointDistribution merge(const JointDistribution& a, const JointDistribution& b)
{
    if (a.variables() != b.variables()) {
        throw std::invalid_argument("cannot merge distributions with different variables");
    }
    std::vector<JointDistribution::Entry> out;
    out.reserve(a.support_size() + b.support_size());
    std::merge(a.entries().begin(), a.entries().end(), b.entries().begin(), b.entries().end(),
               std::back_inserter(out),
               [](const auto& x, const auto& y) { return x.first < y.first; });
    return JointDistribution(a.variables(), std::move(out));
}

std::uint64_t MutualInformation::Projection::key(std::span<const Symbol> observation) const
{
    return codec.encode_indexed(observation, vars);
}

MutualInformation::MutualInformation(const JointDistribution& dist, VarSet x, VarSet y,
                                     VarSet cond)
{
    if (dist.empty()) {
        throw std::domain_error("mutual information of an empty distribution");
    }
    if (x.empty() || y.empty()) {
        throw std::invalid_argument("mutual information needs nonempty variable sets");
    }
    const auto n = dist.variables().size();
    std::vector<int> used(n, 0);
    for (const auto* set : {&x, &y, &cond}) {
        for (auto i : *set) {
            if (i >= n) {
                throw std::out_of_range("variable index out of range");
            }
            if (used[i]++) {
                throw std::invalid_argument("variable sets of a mutual information must be disjoint");
            }
        }
    }
    const auto& vars = dist.variables();
    auto make = [&](VarSet v) {
        Projection p{std::move(v), {}};
        p.codec = TupleCodec(arities_of(vars, p.vars));
        return p;
    };
    VarSet xyz = x;
    xyz.insert(xyz.end(), y.begin(), y.end());
    xyz.insert(xyz.end(), cond.begin(), cond.end());
    VarSet xz = x;
    xz.insert(xz.end(), cond.begin(), cond.end());
    VarSet yz = y;
    yz.insert(yz.end(), cond.begin(), cond.end());
    xyz_ = make(xyz);
    xz_ = make(xz);
    yz_ = make(yz);
    z_ = make(cond);

    std::vector<Symbol> obs(n);
    for (const auto& [key, w] : dist.entries()) {
        dist.codec().decode(key, obs);
        w_xyz_[xyz_.key(obs)] += w;
        w_xz_[xz_.key(obs)] += w;
        w_yz_[yz_.key(obs)] += w;
        w_z_[z_.key(obs)] += w;
    }
    total_ = dist.total();
    variable_count_ = n;

    // Deterministic iteration order over configurations.
    std::vector<std::pair<std::uint64_t, double>> joint(w_xyz_.begin(), w_xyz_.end());
    std::sort(joint.begin(), joint.end());
    configs_.reserve(joint.size());
    std::vector<Symbol> part(xyz_.vars.size());
    std::vector<Symbol> pseudo(n, 0);
    for (const auto& [key, w] : joint) {
        xyz_.codec.decode(key, part);
        for (std::size_t j = 0; j < part.size(); ++j) {
            pseudo[xyz_.vars[j]] = part[j];
        }
        const double value = std::log2(w * lookup(w_z_, z_.key(pseudo)) /
                                       (lookup(w_xz_, xz_.key(pseudo)) *
                                        lookup(w_yz_, yz_.key(pseudo))));
        configs_.push_back({key, w, value});
        average_ += (w / total_) * value;
    }
}

double MutualInformation::lookup(const std::unordered_map<std::uint64_t, double>& table,
                                 std::uint64_t key)
{
    auto it = table.find(key);
    return it == table.end() ? 0.0 : it->second;
}

double MutualInformation::local(std::span<const Symbol> observation) const
{
    if (observation.size() != variable_count_) {
        throw std::invalid_argument("observation length does not match variable count");
    }
    const double joint = lookup(w_xyz_, xyz_.key(observation));
    if (joint <= 0.0) {
        throw std::domain_error("local mutual information at a zero-probability configuration");
    }
    return std::log2(joint * lookup(w_z_, z_.key(observation)) /
                     (lookup(w_xz_, xz_.key(observation)) * lookup(w_yz_, yz_.key(observation))));
}

double local_mi(const JointDistribution& dist, const VarSet& x, const VarSet& y,
                const VarSet& cond, std::span<const Symbol> observation)
{
    return MutualInformation(dist, x, y, cond).local(observation);
}

double avg_mi(const JointDistribution& dist, const VarSet& x, const VarSet& y,
              const VarSet& cond)
{
    return MutualInformation(dist, x, y, cond).average();
}

double entropy(const JointDistribution& dist, const VarSet& vars)
{
    if (dist.empty()) {
        throw std::domain_error("entropy of an empty distribution");
    }
    const auto m = dist.marginal(vars);
    double h = 0.0;
    for (const auto& [key, w] : m.entries()) {
        const double p = w / m.total();
        h -= p * std::log2(p);
    }
    return h;
}

} // namespace synpid
