#include "synpid/eca.hpp"

#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace synpid::eca {

RuleTable::RuleTable(int rule_number)
    : rule_number_(rule_number)
{
    if (rule_number < 0 || rule_number > 255) {
        throw std::out_of_range("rule number must be in [0, 255], got " +
                                std::to_string(rule_number));
    }
    for (int i = 0; i < 8; ++i) {
        outputs_[i] = static_cast<std::uint8_t>((rule_number >> i) & 1);
    }
}

int RuleTable::encode() const
{
    int code = 0;
    for (int i = 0; i < 8; ++i) {
        code |= outputs_[i] << i;
    }
    return code;
}

RuleTable decode_rule(int rule_number)
{
    return RuleTable(rule_number);
}

SpacetimeGrid::SpacetimeGrid(int width, int steps, std::uint64_t seed,
                             std::vector<std::uint8_t> cells)
    : width_(width), steps_(steps), seed_(seed), cells_(std::move(cells))
{
    if (cells_.size() != static_cast<std::size_t>(width_) * steps_) {
        throw std::invalid_argument("grid cell count does not match width * steps");
    }
    for (auto c : cells_) {
        if (c > 1) {
            throw std::invalid_argument("grid cells must be 0 or 1");
        }
    }
}

std::vector<std::uint8_t> random_row(int width, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(width));
    for (auto& cell : row) {
        cell = static_cast<std::uint8_t>(gen() >> 63);
    }
    return row;
}

std::vector<std::uint8_t> step(const RuleTable& rule, std::span<const std::uint8_t> row)
{
    const std::size_t n = row.size();
    std::vector<std::uint8_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto left = row[(i + n - 1) % n];
        const auto right = row[(i + 1) % n];
        next[i] = rule(left, row[i], right);
    }
    return next;
}

SpacetimeGrid run_from(const RuleTable& rule, std::vector<std::uint8_t> initial, int steps,
                       std::uint64_t seed)
{
    const int width = static_cast<int>(initial.size());
    if (width < 3) {
        throw std::invalid_argument("width must be at least 3");
    }
    if (steps < 1) {
        throw std::invalid_argument("steps must be at least 1");
    }
    std::vector<std::uint8_t> cells;
    cells.reserve(static_cast<std::size_t>(width) * steps);
    cells.insert(cells.end(), initial.begin(), initial.end());
    std::vector<std::uint8_t> current = std::move(initial);
    for (int t = 1; t < steps; ++t) {
        current = step(rule, current);
        cells.insert(cells.end(), current.begin(), current.end());
    }
    return SpacetimeGrid(width, steps, seed, std::move(cells));
}

SpacetimeGrid run(const RuleTable& rule, int width, int steps, std::uint64_t seed)
{
    if (width < 3) {
        throw std::invalid_argument("width must be at least 3");
    }
    return run_from(rule, random_row(width, seed), steps, seed);
}

void write_pgm(const SpacetimeGrid& grid, std::ostream& out)
{
    out << "P5\n" << grid.width() << ' ' << grid.steps() << "\n1\n";
    out.write(reinterpret_cast<const char*>(grid.cells().data()),
              static_cast<std::streamsize>(grid.cells().size()));
}

void write_csv(const SpacetimeGrid& grid, std::ostream& out)
{
    for (int t = 0; t < grid.steps(); ++t) {
        auto row = grid.row(t);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i != 0) {
                out << ',';
            }
            out << static_cast<int>(row[i]);
        }
        out << '\n';
    }
}

} // namespace synpid::eca
