#include "elm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "json.hpp"
#include "elm/solver.hpp"

namespace elm {

namespace {

constexpr std::size_t kBenchInputs = 8;
constexpr double kBenchK0sq = 1.0;

template <class F>
double time_seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Dataset synthetic_data(std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  Dataset d{Matrix(kBenchInputs, samples), Matrix(1, samples)};
  for (std::size_t k = 0; k < samples; ++k) {
    double s = 0.0;
    for (std::size_t n = 0; n < kBenchInputs; ++n) {
      d.x(n, k) = unit(gen);
      s += d.x(n, k);
    }
    d.y(0, k) = std::sin(s) + noise(gen);
  }
  return d;
}

Matrix hidden_rows(std::size_t count, const Matrix& x, std::uint64_t seed) {
  const NodeParams p = draw_nodes(count, x.rows(), seed);
  return compute_hidden(p.input, p.bias, Activation::sigmoid, x);
}

void initialize(QState& s, const Matrix& h, const Matrix& y) {
  s = h.rows() == 0 ? make_empty_q_state(y, kBenchK0sq) : make_q_state(h, y, kBenchK0sq);
}

void initialize(LdlState& s, const Matrix& h, const Matrix& y) {
  s = h.rows() == 0 ? make_empty_ldl_state(y, kBenchK0sq) : make_ldl_state(h, y, kBenchK0sq);
}

QState grow(const QState& s, const Matrix& rows) { return grow_q_block(s, rows); }
LdlState grow(const LdlState& s, const Matrix& rows) { return grow_ldl_block(s, rows); }
QState shrink(const QState& s, const RemovalPlan& p) { return shrink_q(s, p); }
LdlState shrink(const LdlState& s, const RemovalPlan& p) { return shrink_ldl(s, p); }

template <class State>
BenchRow run_cell(const BenchCell& cell, std::size_t reps, std::uint64_t seed) {
  const Dataset data = synthetic_data(cell.samples, seed);
  BenchRow row{cell, reps, 0.0, 0.0, 0.0, 0.0};
  std::vector<double> incremental, oracle;

  if (cell.op == BenchOp::grow) {
    if (cell.step == 0) throw ArgumentError("bench: grow step must be at least 1");
    const Matrix base_h = hidden_rows(cell.nodes, data.x, seed + 1);
    const Matrix new_rows = hidden_rows(cell.step, data.x, seed + 2);
    State base;
    initialize(base, base_h, data.y);
    const Matrix grown_h = vstack(base_h, new_rows);
    State result;
    Matrix reference;
    for (std::size_t r = 0; r < reps; ++r) {
      incremental.push_back(time_seconds([&] { result = grow(base, new_rows); }));
      oracle.push_back(time_seconds([&] { reference = direct_weights(grown_h, data.y, kBenchK0sq); }));
    }
    row.deviation = relative_deviation(result.weights, reference);
  } else {
    if (cell.step == 0 || cell.step >= cell.nodes) {
      throw ArgumentError("bench: prune step must be in [1, nodes)");
    }
    const Matrix base_h = hidden_rows(cell.nodes, data.x, seed + 1);
    State base;
    initialize(base, base_h, data.y);
    std::vector<std::size_t> all(cell.nodes);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::mt19937_64 gen(seed + 3);
    std::shuffle(all.begin(), all.end(), gen);
    all.resize(cell.step);
    const RemovalPlan plan = make_removal_plan(cell.nodes, all);
    const Matrix kept_h = permute_rows(base_h, plan.perm).block(0, 0, plan.kept(), base_h.cols());
    State result;
    Matrix reference;
    for (std::size_t r = 0; r < reps; ++r) {
      incremental.push_back(time_seconds([&] { result = shrink(base, plan); }));
      oracle.push_back(time_seconds([&] { reference = direct_weights(kept_h, data.y, kBenchK0sq); }));
    }
    row.deviation = relative_deviation(result.weights, reference);
  }

  row.incremental_seconds = median(incremental);
  row.oracle_seconds = median(oracle);
  row.speedup = row.incremental_seconds > 0.0 ? row.oracle_seconds / row.incremental_seconds
                                              : std::numeric_limits<double>::infinity();
  return row;
}

}  // namespace

std::string_view to_string(BenchOp op) noexcept { return op == BenchOp::grow ? "grow" : "prune"; }

BenchOp parse_bench_op(std::string_view name) {
  if (name == "grow") return BenchOp::grow;
  if (name == "prune") return BenchOp::prune;
  throw ArgumentError("unknown bench op '" + std::string(name) + "'");
}

std::vector<BenchRow> run_bench(const std::vector<BenchCell>& cells, std::size_t repetitions,
                                std::uint64_t seed) {
  const std::size_t reps = std::max(repetitions, kMinBenchRepetitions);
  std::vector<BenchRow> rows;
  rows.reserve(cells.size());
  for (const BenchCell& cell : cells) {
    if (cell.samples == 0) throw ArgumentError("bench: samples must be positive");
    rows.push_back(cell.variant == Variant::q ? run_cell<QState>(cell, reps, seed)
                                              : run_cell<LdlState>(cell, reps, seed));
  }
  return rows;
}

std::string bench_row_json(const BenchRow& row) {
  nlohmann::ordered_json j;
  j["op"] = std::string(to_string(row.cell.op));
  j["l"] = row.cell.nodes;
  j["step"] = row.cell.step;
  j["K"] = row.cell.samples;
  j["variant"] = std::string(to_string(row.cell.variant));
  j["repetitions"] = row.repetitions;
  j["incremental_s"] = row.incremental_seconds;
  j["oracle_s"] = row.oracle_seconds;
  j["speedup"] = std::isfinite(row.speedup) ? nlohmann::ordered_json(row.speedup) : nullptr;
  j["deviation"] = row.deviation;
  return j.dump();
}

}  // namespace elm
