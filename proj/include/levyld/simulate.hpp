#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "levyld/chain.hpp"
#include "levyld/exp_gen.hpp"
#include "levyld/jump_model.hpp"
#include "levyld/limit_gen.hpp"

namespace levyld {

struct SimConfig {
  static constexpr double kDefaultBudget = 1e8;
  static constexpr double kMinEps = 0.05;

  ScalePair scales{0.2, 0.2};
  double horizon = 1.0;
  std::size_t paths = 1;
  std::uint64_t seed = 1;
  std::size_t x0 = 0;
  double u0 = 0.0;
  // Upper bound on the expected event count of one path.
  double event_budget = kDefaultBudget;
  // Paths are split into this many contiguous batches, one thread each.
  // Results do not depend on it.
  unsigned batches = 1;
};

enum class EventKind { switch_state, jump };

struct SimEvent {
  std::size_t path = 0;
  double time = 0.0;
  EventKind kind = EventKind::jump;
  std::size_t state = 0;
  double position = 0.0;
};

using EventSink = std::function<void(const SimEvent&)>;

struct SimResult {
  std::vector<double> endpoints;
  std::vector<std::uint64_t> events;
};

// Expected events per path: t eps^-3 sum_x pi(x) (q(x) + m(x)).
double expected_events(const ChainModel& chain, const ChainAnalysis& analysis, const PrelimitMeasure& measure,
                       const SimConfig& cfg);

// Event-driven simulation of the pre-limit switched evolution. In state x
// events arrive at rate eps^-3 (q(x) + m(x)); each is a switch drawn from
// P(x, .) or a jump of size eps*v with v drawn proportional to the atom
// intensities. Path i uses substream (seed, i). Throws BudgetExceeded when
// eps < 0.05 or the expected event count exceeds the budget. A sink, when
// given, receives every event in path order and forces a single batch.
SimResult simulate_prelimit(const ChainModel& chain, const ChainAnalysis& analysis, const PrelimitMeasure& measure,
                            const SimConfig& cfg, const EventSink& sink = {});

// Exact endpoint sampling of the limit process:
// u0 + b t + sigma sqrt(t) Z + sum_k jump_k N_k, N_k ~ Poisson(rate_k t).
std::vector<double> simulate_limit(const LimitGenerator& gen, const SimConfig& cfg);

struct ScgfEstimate {
  static constexpr double kMinEffective = 10.0;

  double lambda = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double n_effective = 0.0;

  [[nodiscard]] bool reportable() const { return n_effective >= kMinEffective; }
};

// eps * ln( mean exp(lambda x_i / eps) ) with a delta-method standard error.
std::vector<ScgfEstimate> estimate_scgf(std::span<const double> endpoints, double eps,
                                        std::span<const double> lambdas);

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
};

SampleStats sample_stats(std::span<const double> x);

// path_index,endpoint
void write_endpoints_csv(std::span<const double> endpoints, std::ostream& out);
// lambda,scgf,std_error,n_effective
void write_scgf_csv(std::span<const ScgfEstimate> rows, std::ostream& out);

}  // namespace levyld
