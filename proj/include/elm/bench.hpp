#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elm/session.hpp"

namespace elm {

enum class BenchOp { grow, prune };

// One grid cell. For grow, `nodes` is the state size before the update (0
// grows from scratch in one block) and `step` the block size. For prune,
// `step` nodes are removed from a state of `nodes`.
struct BenchCell {
  BenchOp op = BenchOp::grow;
  std::size_t nodes = 0;
  std::size_t step = 1;
  std::size_t samples = 1000;
  Variant variant = Variant::ldl;
};

struct BenchRow {
  BenchCell cell;
  std::size_t repetitions = 0;
  double incremental_seconds = 0.0;  // median
  double oracle_seconds = 0.0;       // median of direct_weights on the updated H
  double speedup = 0.0;              // oracle / incremental
  double deviation = 0.0;            // W vs direct_weights, relative Frobenius
};

inline constexpr std::size_t kMinBenchRepetitions = 5;

// Runs every cell on seeded synthetic data (8 inputs, 1 output, sigmoid
// nodes, k0sq = 1). Repetitions below kMinBenchRepetitions are raised to it.
// Timing uses std::chrono::steady_clock; cells run sequentially.
std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells, std::size_t repetitions,
                                std::uint64_t seed);

// One JSON object per row, no trailing newline.
std::string bench_row_json(const BenchRow& row);

std::string_view to_string(BenchOp op) noexcept;
BenchOp parse_bench_op(std::string_view name);

}  // namespace elm
