#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace synpid::eca {

/// Lookup table of an elementary CA rule in Wolfram numbering.
///
/// The output for neighborhood (left, center, right) is bit
/// `left*4 + center*2 + right` of the rule number, so (1,1,1) is bit 7
/// and (0,0,0) is bit 0.
class RuleTable {
public:
    explicit RuleTable(int rule_number);

    int rule_number() const { return rule_number_; }
    const std::array<std::uint8_t, 8>& outputs() const { return outputs_; }

    std::uint8_t operator()(std::uint8_t left, std::uint8_t center, std::uint8_t right) const
    {
        return outputs_[(left << 2) | (center << 1) | right];
    }

    /// Re-encodes the outputs in Wolfram order.
    int encode() const;

private:
    int rule_number_;
    std::array<std::uint8_t, 8> outputs_{};
};

/// Throws std::out_of_range unless 0 <= rule_number <= 255.
RuleTable decode_rule(int rule_number);

/// Binary cell states indexed by (time, cell), row-major in time.
class SpacetimeGrid {
public:
    SpacetimeGrid(int width, int steps, std::uint64_t seed, std::vector<std::uint8_t> cells);

    int width() const { return width_; }
    int steps() const { return steps_; }
    std::uint64_t seed() const { return seed_; }

    std::uint8_t at(int time, int cell) const
    {
        return cells_[static_cast<std::size_t>(time) * width_ + cell];
    }
    std::span<const std::uint8_t> row(int time) const
    {
        return {cells_.data() + static_cast<std::size_t>(time) * width_,
                static_cast<std::size_t>(width_)};
    }
    const std::vector<std::uint8_t>& cells() const { return cells_; }

    friend bool operator==(const SpacetimeGrid&, const SpacetimeGrid&) = default;

private:
    int width_;
    int steps_;
    std::uint64_t seed_;
    std::vector<std::uint8_t> cells_;
};

/// Uniform i.i.d. initial row. Generator is std::mt19937_64 seeded with
/// `seed`; cell i takes the top bit of the i-th 64-bit output. Both are
/// fully specified by the standard, so rows are identical on every platform.
std::vector<std::uint8_t> random_row(int width, std::uint64_t seed);

/// One synchronous update with periodic boundaries.
std::vector<std::uint8_t> step(const RuleTable& rule, std::span<const std::uint8_t> row);

/// Evolves `initial` for `steps` rows in total (row 0 is `initial`).
SpacetimeGrid run_from(const RuleTable& rule, std::vector<std::uint8_t> initial, int steps,
                       std::uint64_t seed = 0);

/// Requires width >= 3 and steps >= 1; throws std::invalid_argument otherwise.
SpacetimeGrid run(const RuleTable& rule, int width, int steps, std::uint64_t seed);

/// Binary PGM (P5, maxval 1), one image row per time step.
void write_pgm(const SpacetimeGrid& grid, std::ostream& out);
/// One line per time step, comma-separated bits.
void write_csv(const SpacetimeGrid& grid, std::ostream& out);

} // namespace synpid::eca
