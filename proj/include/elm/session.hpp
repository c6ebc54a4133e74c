#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "elm/decremental.hpp"
#include "elm/model.hpp"

namespace elm {

enum class Variant { q, ldl };

std::string_view to_string(Variant v) noexcept;
Variant parse_variant(std::string_view name);

struct HistoryRecord {
  std::string event;
  std::size_t nodes = 0;
  double mse = 0.0;
};

struct SessionOptions {
  std::size_t initial_nodes = 16;
  double k0sq = 1.0;
  Variant variant = Variant::ldl;
  std::uint64_t seed = 0;
  Activation activation = Activation::sigmoid;
  bool allow_zero_reg = false;
  bool minmax = false;
};

using EngineState = std::variant<QState, LdlState>;

// A model, its training data and one update engine. Every operation returns a
// new Session, so a copy is a snapshot. Memory is O(l K) for the retained H.
struct Session {
  ElmModel model;
  Dataset data;  // inputs already passed through model.scaler
  Variant variant = Variant::ldl;
  EngineState engine;
  std::vector<HistoryRecord> history;

  std::size_t nodes() const noexcept { return model.hidden(); }
  double k0sq() const noexcept;
  const Matrix& hidden() const noexcept;
};

struct VerifyReport {
  std::size_t nodes = 0;
  std::size_t samples = 0;
  Variant variant = Variant::ldl;
  double weight_deviation = 0.0;   // W vs direct_weights, relative Frobenius
  double inverse_deviation = 0.0;  // Q or L D L^T vs invert_to_q
  double mse = 0.0;
  bool factor_hygiene = true;      // exact unit L / positive D, or symmetric Q
};

// Draws initial_nodes random nodes and solves W with the direct oracle.
// k0sq must be positive unless allow_zero_reg is set.
Session session_init(const Dataset& raw, const SessionOptions& options);

// Persisted engine state: Q for the q variant, the inverse LDL factors for ldl.
using EngineFactors = std::variant<Matrix, InverseLdl>;

// Rebuilds a session from a trained model, its stored engine factors and the
// raw training data. H is recomputed from the model; nothing is re-solved.
Session session_restore(ElmModel model, const Dataset& raw, double k0sq, EngineFactors factors);

// Draws `delta` nodes from `seed` (see draw_nodes) and applies one block grow.
Session add_nodes(const Session& s, std::size_t delta, std::uint64_t seed);
Session add_nodes(const Session& s, NodeParams params);
Session remove_nodes(const Session& s, std::span<const std::size_t> indices);

// Re-solves the engine state from the oracle, discarding accumulated drift.
Session refresh(const Session& s);

VerifyReport verify(const Session& s);

}  // namespace elm
