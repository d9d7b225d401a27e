#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "levyld/chain.hpp"
#include "levyld/exp_gen.hpp"
#include "levyld/jump_model.hpp"

namespace levyld {

struct RunDefaults {
  std::vector<double> u_grid = default_u_grid();
  std::vector<double> lambda_grid{-1.0, -0.5, 0.5, 1.0};
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  DeltaRule delta_rule{};
  std::uint64_t seed = 1;
};

/// Parsed model file.
///
/// JSON layout:
///   {
///     "chain":    {"states": ["s1", ...], "Q": [[...], ...]},
///     "jumps":    {"s1": {"a1": 1, "a": 0.5, "c": 3, "gamma0": [[1.0, 0.2]]}, ...},
///     "defaults": {"u_grid": [...], "lambda_grid": [...], "eps_list": [...],
///                  "delta_rule": "equal", "seed": 1}
///   }
/// Unknown keys are rejected. `defaults` and each of its fields may be
/// omitted.
struct ModelConfig {
  std::vector<std::string> states;
  ChainModel chain;
  JumpModel jumps;
  RunDefaults defaults;
};

// Throws InvalidModel with a message naming the offending field.
ModelConfig parse_config(const std::string& text);
ModelConfig load_config(const std::string& path);

// Canonical JSON with every field spelled out; parse_config round-trips it.
std::string to_canonical_json(const ModelConfig& cfg);

}  // namespace levyld
