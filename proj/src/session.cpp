#include "elm/session.hpp"

#include <limits>

namespace elm {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

const Matrix& engine_weights(const EngineState& e) {
  return std::visit([](const auto& st) -> const Matrix& { return st.weights; }, e);
}

double training_mse(const Session& s) {
  return mse(s.data.y, mat_mul(s.model.output_weights, s.hidden()));
}

EngineState build_engine(Variant variant, Matrix hidden, Matrix targets, double k0sq) {
  if (variant == Variant::q) return make_q_state(std::move(hidden), std::move(targets), k0sq);
  return make_ldl_state(std::move(hidden), std::move(targets), k0sq);
}

Session with_engine(const Session& s, EngineState engine, ElmModel model, const char* event) {
  Session out{std::move(model), s.data, s.variant, std::move(engine), s.history};
  out.model.output_weights = engine_weights(out.engine);
  out.history.push_back({event, out.nodes(), training_mse(out)});
  return out;
}

}  // namespace

std::string_view to_string(Variant v) noexcept { return v == Variant::q ? "q" : "ldl"; }

Variant parse_variant(std::string_view name) {
  if (name == "q") return Variant::q;
  if (name == "ldl") return Variant::ldl;
  throw ArgumentError("unknown variant '" + std::string(name) + "'");
}

double Session::k0sq() const noexcept {
  return std::visit([](const auto& st) { return st.k0sq; }, engine);
}

const Matrix& Session::hidden() const noexcept {
  return std::visit([](const auto& st) -> const Matrix& { return st.hidden; }, engine);
}

Session session_init(const Dataset& raw, const SessionOptions& options) {
  validate(raw);
  if (options.initial_nodes == 0) throw ArgumentError("session_init: need at least one node");
  if (!(options.k0sq >= 0.0)) throw ArgumentError("session_init: k0sq must be non-negative");
  if (options.k0sq == 0.0 && !options.allow_zero_reg) {
    throw ArgumentError("session_init: k0sq == 0 risks a singular Gram; pass allow_zero_reg");
  }

  ElmModel model =
      random_init(options.initial_nodes, raw.x.rows(), options.seed, options.activation);
  if (options.minmax) model.scaler = MinMaxScaler::fit(raw.x);
  Dataset data{prepare_inputs(model, raw.x), raw.y};

  Matrix h = compute_hidden(model, data.x);
  EngineState engine = build_engine(options.variant, std::move(h), data.y, options.k0sq);
  model.output_weights = engine_weights(engine);

  Session s{std::move(model), std::move(data), options.variant, std::move(engine), {}};
  s.history.push_back({"init", s.nodes(), training_mse(s)});
  return s;
}

Session session_restore(ElmModel model, const Dataset& raw, double k0sq, EngineFactors factors) {
  validate(raw);
  if (!model.trained()) throw StateError("session_restore: model has no output weights");
  if (raw.x.rows() != model.inputs()) {
    throw ShapeError("session_restore: data has " + std::to_string(raw.x.rows()) +
                     " features, model expects " + std::to_string(model.inputs()));
  }
  if (raw.y.rows() != model.output_weights.rows()) {
    throw ShapeError("session_restore: target count does not match model outputs");
  }
  Dataset data{prepare_inputs(model, raw.x), raw.y};
  Matrix h = compute_hidden(model, data.x);
  const std::size_t l = model.hidden();

  Session s;
  std::visit(overloaded{
                 [&](Matrix& q) {
                   if (q.rows() != l || q.cols() != l) throw ShapeError("session_restore: Q size");
                   s.variant = Variant::q;
                   s.engine = QState{std::move(h), data.y, k0sq, std::move(q), model.output_weights};
                 },
                 [&](InverseLdl& f) {
                   if (f.size() != l || f.unit_upper.rows() != l) {
                     throw ShapeError("session_restore: LDL factor size");
                   }
                   s.variant = Variant::ldl;
                   s.engine =
                       LdlState{std::move(h), data.y, k0sq, std::move(f), model.output_weights};
                 },
             },
             factors);
  s.model = std::move(model);
  s.data = std::move(data);
  s.history.push_back({"restore", s.nodes(), training_mse(s)});
  return s;
}

Session add_nodes(const Session& s, std::size_t delta, std::uint64_t seed) {
  if (delta == 0) throw ArgumentError("add_nodes: delta must be at least 1");
  return add_nodes(s, draw_nodes(delta, s.model.inputs(), seed));
}

Session add_nodes(const Session& s, NodeParams params) {
  if (params.input.rows() == 0) throw ArgumentError("add_nodes: empty block");
  if (params.input.cols() != s.model.inputs()) throw ShapeError("add_nodes: input width");
  ElmModel model = s.model;
  NodeBlock block = make_node_block(std::move(params), model.activation, s.data.x);
  EngineState engine = std::visit(
      overloaded{
          [&](const QState& st) -> EngineState { return grow_q_block(st, block); },
          [&](const LdlState& st) -> EngineState { return grow_ldl_block(st, block); },
      },
      s.engine);
  model.input_weights = vstack(model.input_weights, block.params.input);
  model.biases.insert(model.biases.end(), block.params.bias.begin(), block.params.bias.end());
  return with_engine(s, std::move(engine), std::move(model), "grow");
}

Session remove_nodes(const Session& s, std::span<const std::size_t> indices) {
  const RemovalPlan plan = make_removal_plan(s.nodes(), indices);
  EngineState engine = std::visit(
      overloaded{
          [&](const QState& st) -> EngineState { return shrink_q(st, plan); },
          [&](const LdlState& st) -> EngineState { return shrink_ldl(st, plan); },
      },
      s.engine);

  ElmModel model = s.model;
  model.input_weights =
      permute_rows(model.input_weights, plan.perm).block(0, 0, plan.kept(), model.inputs());
  Vector biases = permute_vector(model.biases, plan.perm);
  biases.resize(plan.kept());
  model.biases = std::move(biases);
  return with_engine(s, std::move(engine), std::move(model), "prune");
}

Session refresh(const Session& s) {
  EngineState engine = build_engine(s.variant, s.hidden(), s.data.y, s.k0sq());
  return with_engine(s, std::move(engine), s.model, "refresh");
}

VerifyReport verify(const Session& s) {
  VerifyReport r;
  r.nodes = s.nodes();
  r.samples = s.data.samples();
  r.variant = s.variant;
  const Matrix& h = s.hidden();
  const double k0sq = s.k0sq();
  r.weight_deviation = relative_deviation(s.model.output_weights, direct_weights(h, s.data.y, k0sq));
  const Matrix q_ref = invert_to_q(build_gram(h, k0sq));
  std::visit(overloaded{
                 [&](const QState& st) {
                   r.inverse_deviation = relative_deviation(st.q, q_ref);
                   r.factor_hygiene = is_symmetric(st.q);
                 },
                 [&](const LdlState& st) {
                   r.inverse_deviation = relative_deviation(ldl_product(st.factors), q_ref);
                   r.factor_hygiene = factor_hygiene_ok(st.factors);
                 },
             },
             s.engine);
  r.mse = training_mse(s);
  return r;
}

}  // namespace elm
