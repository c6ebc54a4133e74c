// elm: train, grow, prune, evaluate and verify extreme learning machines, and
// benchmark incremental updates against a full re-solve.
//
// Exit codes: 0 ok, 2 usage, 3 data/shape, 4 numerical degeneracy.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elm/elm.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

// Largest deviation from the direct solve a written model may carry.
constexpr double kVerifyBudget = 1e-8;

struct CliError {
  int code;
  std::string message;
};

int exit_code_for(elm_status s) {
  switch (s) {
    case ELM_OK: return kExitOk;
    case ELM_ERR_ARGUMENT: return kExitUsage;
    case ELM_ERR_SINGULAR:
    case ELM_ERR_DEGENERATE: return kExitNumeric;
    default: return kExitData;
  }
}

void check(elm_status s, const std::string& context) {
  if (s != ELM_OK) {
    throw CliError{exit_code_for(s), context + ": " + elm_status_name(s) + ": " + elm_last_error()};
  }
}

struct DatasetDeleter {
  void operator()(elm_dataset* d) const { elm_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(elm_model* m) const { elm_model_free(m); }
};
struct SessionDeleter {
  void operator()(elm_session* s) const { elm_session_free(s); }
};
using DatasetPtr = std::unique_ptr<elm_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<elm_model, ModelDeleter>;
using SessionPtr = std::unique_ptr<elm_session, SessionDeleter>;

struct Options {
  std::string x_path;
  std::string y_path;
  double reg = 1.0;
  std::string variant = "ldl";
  std::uint64_t seed = 0;
  std::string activation = "sigmoid";
  std::string model_path;
  std::string out_path;
  std::string report_path;
  bool header = false;
  bool light = false;
  bool allow_zero_reg = false;
  bool minmax = false;
  std::size_t hidden = 16;
  std::size_t nodes = 0;
  std::string indices;
  std::string config_path;
  std::size_t reps = 5;
};

const char* variant_name(int v) { return v == ELM_VARIANT_Q ? "q" : "ldl"; }

int variant_code(const std::string& name) { return name == "q" ? ELM_VARIANT_Q : ELM_VARIANT_LDL; }

int activation_code(const std::string& name) {
  if (name == "tanh") return ELM_ACT_TANH;
  if (name == "gaussian") return ELM_ACT_GAUSSIAN;
  if (name == "linear") return ELM_ACT_LINEAR;
  return ELM_ACT_SIGMOID;
}

DatasetPtr load_dataset(const std::string& x, const std::string& y, bool header) {
  elm_dataset* d = nullptr;
  check(elm_dataset_from_csv(x.c_str(), y.c_str(), header ? 1 : 0, &d), "loading data");
  return DatasetPtr(d);
}

ModelPtr load_model(const std::string& path) {
  elm_model* m = nullptr;
  check(elm_model_load(path.c_str(), &m), "loading model '" + path + "'");
  return ModelPtr(m);
}

// Data named on the command line, else the paths recorded in the model.
DatasetPtr dataset_for(const Options& o, const elm_model* model) {
  if (!o.x_path.empty() || !o.y_path.empty()) {
    if (o.x_path.empty() || o.y_path.empty()) throw CliError{kExitUsage, "--x and --y go together"};
    return load_dataset(o.x_path, o.y_path, o.header);
  }
  const char* x = model ? elm_model_x_path(model) : nullptr;
  const char* y = model ? elm_model_y_path(model) : nullptr;
  if (!x || !y) throw CliError{kExitUsage, "no training data: pass --x and --y"};
  return load_dataset(x, y, elm_model_data_header(model) != 0);
}

std::string absolute(const std::string& p) { return std::filesystem::absolute(p).string(); }

class Report {
public:
  explicit Report(const std::string& path) {
    if (path.empty()) return;
    out_.open(path, std::ios::trunc);
    if (!out_) throw CliError{kExitData, "cannot write report '" + path + "'"};
  }
  void write(const nlohmann::ordered_json& record) {
    if (out_.is_open()) out_ << record.dump() << '\n';
  }
  void write_line(const std::string& line) {
    if (out_.is_open()) out_ << line << '\n';
  }

private:
  std::ofstream out_;
};

nlohmann::ordered_json verify_json(const elm_verify_report& r) {
  nlohmann::ordered_json j;
  j["l"] = r.nodes;
  j["K"] = r.samples;
  j["variant"] = variant_name(r.variant);
  j["mse"] = r.mse;
  j["weight_deviation"] = r.weight_deviation;
  if (std::isnan(r.inverse_deviation)) {
    j["inverse_deviation"] = nullptr;
  } else {
    j["inverse_deviation"] = r.inverse_deviation;
  }
  j["factor_hygiene"] = r.factor_hygiene != 0;
  return j;
}

void print_verify(const elm_verify_report& r) {
  std::printf("  nodes (l)          %zu\n", r.nodes);
  std::printf("  samples (K)        %zu\n", r.samples);
  std::printf("  variant            %s\n", variant_name(r.variant));
  std::printf("  mse                %.10g\n", r.mse);
  std::printf("  W deviation        %.3e\n", r.weight_deviation);
  if (std::isnan(r.inverse_deviation)) {
    std::printf("  inverse deviation  n/a (light model)\n");
  } else {
    std::printf("  inverse deviation  %.3e\n", r.inverse_deviation);
  }
  std::printf("  factor hygiene     %s\n", r.factor_hygiene ? "ok" : "FAILED");
}

bool within_budget(const elm_verify_report& r) {
  const bool inv_ok = std::isnan(r.inverse_deviation) || r.inverse_deviation <= kVerifyBudget;
  return r.weight_deviation <= kVerifyBudget && inv_ok && r.factor_hygiene;
}

// Verifies, prints and writes the session; the output must verify before the
// file is written.
int finish_session(const char* command, elm_session* session, const Options& o,
                   const std::string& x_abs, const std::string& y_abs, bool header) {
  elm_verify_report r{};
  check(elm_session_verify(session, &r), "verify");
  std::printf("%s: l=%zu K=%zu variant=%s\n", command, r.nodes, r.samples, variant_name(r.variant));
  print_verify(r);

  Report report(o.report_path);
  auto record = verify_json(r);
  record["command"] = command;
  report.write(record);

  if (!within_budget(r)) {
    std::fprintf(stderr, "%s: verification failed (budget %.0e); model not written\n", command,
                 kVerifyBudget);
    return kExitNumeric;
  }

  elm_model* raw = nullptr;
  check(elm_session_to_model(session, &raw), "exporting model");
  ModelPtr model(raw);
  check(elm_model_set_data_paths(model.get(), x_abs.c_str(), y_abs.c_str(), header ? 1 : 0),
        "recording data paths");
  check(elm_model_save(model.get(), o.out_path.c_str(), o.light ? 1 : 0), "saving model");
  std::printf("  wrote              %s%s\n", o.out_path.c_str(), o.light ? " (light)" : "");
  return kExitOk;
}

std::pair<std::string, std::string> data_paths(const Options& o, const elm_model* model) {
  if (!o.x_path.empty()) return {absolute(o.x_path), absolute(o.y_path)};
  return {elm_model_x_path(model), elm_model_y_path(model)};
}

bool data_header(const Options& o, const elm_model* model) {
  return o.x_path.empty() ? elm_model_data_header(model) != 0 : o.header;
}

int cmd_train(const Options& o) {
  DatasetPtr data = load_dataset(o.x_path, o.y_path, o.header);
  elm_train_options t;
  elm_train_options_default(&t);
  t.hidden = o.hidden;
  t.k0sq = o.reg;
  t.variant = variant_code(o.variant);
  t.seed = o.seed;
  t.activation = activation_code(o.activation);
  t.allow_zero_reg = o.allow_zero_reg ? 1 : 0;
  t.minmax = o.minmax ? 1 : 0;
  elm_session* raw = nullptr;
  check(elm_session_train(data.get(), &t, &raw), "train");
  SessionPtr session(raw);
  return finish_session("train", session.get(), o, absolute(o.x_path), absolute(o.y_path), o.header);
}

SessionPtr open_session(const Options& o, ModelPtr& model) {
  model = load_model(o.model_path);
  DatasetPtr data = dataset_for(o, model.get());
  elm_session* raw = nullptr;
  check(elm_session_from_model(model.get(), data.get(), &raw), "restoring session");
  return SessionPtr(raw);
}

int cmd_grow(const Options& o) {
  ModelPtr model;
  SessionPtr session = open_session(o, model);
  check(elm_session_add_nodes(session.get(), o.nodes, o.seed), "grow");
  const auto [x, y] = data_paths(o, model.get());
  return finish_session("grow", session.get(), o, x, y, data_header(o, model.get()));
}

std::vector<std::size_t> parse_indices(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != item.size() || item.empty() || item.find('-') != std::string::npos) {
      throw CliError{kExitUsage, "--indices: bad index '" + item + "'"};
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw CliError{kExitUsage, "--indices: no indices given"};
  return out;
}

int cmd_prune(const Options& o) {
  const auto indices = parse_indices(o.indices);
  ModelPtr model;
  SessionPtr session = open_session(o, model);
  check(elm_session_remove_nodes(session.get(), indices.data(), indices.size()), "prune");
  const auto [x, y] = data_paths(o, model.get());
  return finish_session("prune", session.get(), o, x, y, data_header(o, model.get()));
}

int cmd_eval(const Options& o) {
  ModelPtr model = load_model(o.model_path);
  DatasetPtr data = dataset_for(o, model.get());
  double mse = 0.0;
  check(elm_model_mse(model.get(), data.get(), &mse), "eval");
  elm_model_info info{};
  check(elm_model_info_get(model.get(), &info), "eval");
  std::size_t samples = 0;
  check(elm_dataset_shape(data.get(), nullptr, nullptr, &samples), "eval");
  std::printf("eval: l=%zu K=%zu mse=%.10g\n", info.nodes, samples, mse);
  Report report(o.report_path);
  nlohmann::ordered_json j;
  j["command"] = "eval";
  j["l"] = info.nodes;
  j["K"] = samples;
  j["mse"] = mse;
  report.write(j);
  return kExitOk;
}

int cmd_verify(const Options& o) {
  ModelPtr model = load_model(o.model_path);
  DatasetPtr data = dataset_for(o, model.get());
  elm_verify_report r{};
  check(elm_model_verify(model.get(), data.get(), &r), "verify");
  std::printf("verify: %s\n", o.model_path.c_str());
  print_verify(r);
  const bool ok = within_budget(r);
  std::printf("  budget             %.0e  %s\n", kVerifyBudget, ok ? "PASS" : "FAIL");
  Report report(o.report_path);
  auto j = verify_json(r);
  j["command"] = "verify";
  j["pass"] = ok;
  report.write(j);
  return ok ? kExitOk : kExitNumeric;
}

std::vector<elm_bench_cell> default_grid() {
  return {
      {ELM_BENCH_GROW, 256, 8, 4096, ELM_VARIANT_Q},
      {ELM_BENCH_GROW, 256, 8, 4096, ELM_VARIANT_LDL},
      {ELM_BENCH_PRUNE, 256, 8, 4096, ELM_VARIANT_Q},
      {ELM_BENCH_PRUNE, 256, 8, 4096, ELM_VARIANT_LDL},
      {ELM_BENCH_GROW, 0, 64, 1000, ELM_VARIANT_Q},
      {ELM_BENCH_GROW, 0, 64, 1000, ELM_VARIANT_LDL},
  };
}

std::vector<elm_bench_cell> read_grid(const std::string& path, std::size_t& reps) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitData, "cannot open bench config '" + path + "'"};
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
    if (cfg.contains("repetitions")) reps = cfg.at("repetitions").get<std::size_t>();
    std::vector<elm_bench_cell> cells;
    for (const auto& c : cfg.at("cells")) {
      const std::string op = c.value("op", "grow");
      if (op != "grow" && op != "prune") throw CliError{kExitData, "bench config: bad op '" + op + "'"};
      const std::string variant = c.value("variant", "ldl");
      if (variant != "q" && variant != "ldl") {
        throw CliError{kExitData, "bench config: bad variant '" + variant + "'"};
      }
      cells.push_back({op == "grow" ? ELM_BENCH_GROW : ELM_BENCH_PRUNE, c.at("l").get<std::size_t>(),
                       c.at("step").get<std::size_t>(), c.at("K").get<std::size_t>(),
                       variant_code(variant)});
    }
    return cells;
  } catch (const nlohmann::json::exception& e) {
    throw CliError{kExitData, std::string("bench config: ") + e.what()};
  }
}

int cmd_bench(const Options& o) {
  std::size_t reps = o.reps;
  const auto cells = o.config_path.empty() ? default_grid() : read_grid(o.config_path, reps);
  std::vector<elm_bench_row> rows(cells.size());
  check(elm_bench_run(cells.data(), cells.size(), reps, o.seed, rows.data()), "bench");

  Report report(o.report_path);
  std::printf("%-6s %-4s %6s %5s %6s %14s %14s %9s %11s\n", "op", "var", "l", "step", "K",
              "incremental_s", "oracle_s", "speedup", "deviation");
  bool deviation_ok = true;
  for (const auto& r : rows) {
    std::printf("%-6s %-4s %6zu %5zu %6zu %14.6e %14.6e %9.2f %11.3e\n",
                r.cell.op == ELM_BENCH_GROW ? "grow" : "prune", variant_name(r.cell.variant),
                r.cell.nodes, r.cell.step, r.cell.samples, r.incremental_seconds, r.oracle_seconds,
                r.speedup, r.deviation);
    if (r.cell.op == ELM_BENCH_GROW && r.cell.nodes == 256 && r.cell.step == 8 &&
        r.cell.samples == 4096 && r.speedup < 2.0) {
      std::fprintf(stderr, "warning: speedup %.2f below 2 at l=256 delta=8 K=4096 (%s)\n",
                   r.speedup, variant_name(r.cell.variant));
    }
    if (!(r.deviation <= kVerifyBudget)) deviation_ok = false;
    std::size_t needed = 0;
    check(elm_bench_row_json(&r, nullptr, 0, &needed), "bench report");
    std::string line(needed + 1, '\0');
    check(elm_bench_row_json(&r, line.data(), line.size(), &needed), "bench report");
    line.resize(needed);
    report.write_line(line);
  }
  std::printf("%zu cell(s), repetitions %zu\n", rows.size(), rows.empty() ? reps : rows[0].repetitions);
  if (!deviation_ok) {
    std::fprintf(stderr, "bench: deviation above %.0e\n", kVerifyBudget);
    return kExitNumeric;
  }
  return kExitOk;
}

void add_data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--x", o.x_path, "Input CSV (rows are samples)");
  cmd->add_option("--y", o.y_path, "Target CSV (rows are samples)");
  cmd->add_flag("--header", o.header, "Skip one header line in each CSV");
  cmd->add_option("--report", o.report_path, "Write line-delimited JSON records here");
}

void add_model_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--reg", o.reg, "Tikhonov factor k0^2 (default 1.0)");
  cmd->add_option("--variant", o.variant, "Update engine")->check(CLI::IsMember({"q", "ldl"}));
  cmd->add_option("--seed", o.seed, "Seed for random node parameters");
  cmd->add_option("--activation", o.activation, "Hidden activation")
      ->check(CLI::IsMember({"sigmoid", "tanh", "gaussian", "linear"}));
  cmd->add_flag("--allow-zero-reg", o.allow_zero_reg, "Permit --reg 0");
}

void add_output_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out_path, "Model file to write")->required();
  cmd->add_flag("--light", o.light, "Save only A, d, W (no update state)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic extreme learning machine: grow and prune hidden nodes without retraining"};
  app.require_subcommand(1);
  Options o;

  auto* train = app.add_subcommand("train", "Fit a new model with the direct solver");
  add_data_flags(train, o);
  add_model_flags(train, o);
  add_output_flags(train, o);
  train->add_option("--hidden", o.hidden, "Initial hidden node count")->check(CLI::PositiveNumber);
  train->add_flag("--minmax", o.minmax, "Scale each input feature to [0, 1]");
  train->get_option("--x")->required();
  train->get_option("--y")->required();

  auto* grow = app.add_subcommand("grow", "Add hidden nodes with a block update");
  add_data_flags(grow, o);
  add_output_flags(grow, o);
  grow->add_option("--model", o.model_path, "Model to grow")->required();
  grow->add_option("--nodes", o.nodes, "Number of nodes to add")->required()->check(CLI::PositiveNumber);
  grow->add_option("--seed", o.seed, "Seed for the new nodes");

  auto* prune = app.add_subcommand("prune", "Remove hidden nodes by index");
  add_data_flags(prune, o);
  add_output_flags(prune, o);
  prune->add_option("--model", o.model_path, "Model to prune")->required();
  prune->add_option("--indices", o.indices, "0-based node indices, comma-separated")->required();

  auto* eval = app.add_subcommand("eval", "Report the mean squared error of a model");
  add_data_flags(eval, o);
  eval->add_option("--model", o.model_path, "Model to evaluate")->required();

  auto* verify = app.add_subcommand("verify", "Compare a model against the direct solve");
  add_data_flags(verify, o);
  verify->add_option("--model", o.model_path, "Model to verify")->required();

  auto* bench = app.add_subcommand("bench", "Time incremental updates against a full re-solve");
  bench->add_option("--config", o.config_path, "JSON grid: {\"repetitions\":5,\"cells\":[...]}");
  bench->add_option("--reps", o.reps, "Repetitions per cell (at least 5)");
  bench->add_option("--seed", o.seed, "Seed for synthetic data");
  bench->add_option("--report", o.report_path, "Write one JSON record per cell here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(o);
    if (*grow) return cmd_grow(o);
    if (*prune) return cmd_prune(o);
    if (*eval) return cmd_eval(o);
    if (*verify) return cmd_verify(o);
    if (*bench) return cmd_bench(o);
  } catch (const CliError& e) {
    std::fprintf(stderr, "elm: %s\n", e.message.c_str());
    return e.code;
  }
  return kExitUsage;
}
