#include "levyld/simulate.hpp"

#include <cmath>
#include <sstream>
#include <thread>

#include "levyld/csv.hpp"
#include "levyld/errors.hpp"
#include "levyld/kernels/kernels.hpp"
#include "levyld/rng.hpp"

namespace levyld {

namespace {

// Splits [0, paths) into contiguous batches and runs each on its own thread.
template <typename Fn>
void run_batched(std::size_t paths, unsigned batches, Fn&& fn) {
  const std::size_t b = std::max<std::size_t>(1, std::min<std::size_t>(batches, paths));
  if (b == 1) {
    for (std::size_t i = 0; i < paths; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(b);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t begin = paths * k / b;
    const std::size_t end = paths * (k + 1) / b;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

void check_config(const SimConfig& cfg, std::size_t states) {
  if (cfg.paths == 0) throw InvalidModel("path count must be at least 1");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw InvalidModel("horizon must be positive");
  if (cfg.x0 >= states) throw InvalidModel("initial state out of range");
}

// Per-state event tables for the competing-risks step.
struct StateTable {
  double switch_rate = 0.0;
  double total_rate = 0.0;
  std::vector<double> cumulative;
  std::vector<double> jumps;
};

}  // namespace

double expected_events(const ChainModel& chain, const ChainAnalysis& analysis, const PrelimitMeasure& measure,
                       const SimConfig& cfg) {
  const double eps = cfg.scales.eps;
  double avg = 0.0;
  for (std::size_t x = 0; x < chain.size(); ++x) {
    avg += analysis.pi(static_cast<Eigen::Index>(x)) * (chain.exit_rate(x) + measure.total_mass(x));
  }
  return cfg.horizon * avg / (eps * eps * eps);
}

SimResult simulate_prelimit(const ChainModel& chain, const ChainAnalysis& analysis, const PrelimitMeasure& measure,
                            const SimConfig& cfg, const EventSink& sink) {
  check_config(cfg, chain.size());
  if (measure.size() != chain.size()) throw InvalidModel("measure and chain have different state counts");
  const double eps = cfg.scales.eps;
  if (eps < SimConfig::kMinEps) {
    std::ostringstream msg;
    msg << "eps = " << eps << " below the simulation floor " << SimConfig::kMinEps;
    throw BudgetExceeded(msg.str());
  }
  const double expected = expected_events(chain, analysis, measure, cfg);
  if (expected > cfg.event_budget) {
    std::ostringstream msg;
    msg << "expected " << expected << " events per path exceeds budget " << cfg.event_budget;
    throw BudgetExceeded(msg.str());
  }

  const double time_scale = 1.0 / (eps * eps * eps);
  std::vector<StateTable> tables(chain.size());
  for (std::size_t x = 0; x < chain.size(); ++x) {
    StateTable& tab = tables[x];
    tab.switch_rate = chain.exit_rate(x);
    double acc = 0.0;
    for (const Atom& atom : measure.atoms[x]) {
      acc += atom.rate;
      tab.cumulative.push_back(acc);
      tab.jumps.push_back(eps * atom.jump);
    }
    tab.total_rate = tab.switch_rate + acc;
  }

  SimResult out;
  out.endpoints.assign(cfg.paths, 0.0);
  out.events.assign(cfg.paths, 0);

  auto run_path = [&](std::size_t i) {
    Rng rng = substream(cfg.seed, i);
    std::exponential_distribution<double> holding(1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double t = 0.0;
    double pos = cfg.u0;
    std::size_t x = cfg.x0;
    std::uint64_t count = 0;
    while (true) {
      const StateTable& tab = tables[x];
      if (tab.total_rate <= 0.0) break;
      t += holding(rng) / (time_scale * tab.total_rate);
      if (t > cfg.horizon) break;
      const double pick = unif(rng) * tab.total_rate;
      ++count;
      if (pick < tab.switch_rate) {
        x = sample_next_state(chain, x, pick / tab.switch_rate);
        if (sink) sink({i, t, EventKind::switch_state, x, pos});
      } else {
        const double target = pick - tab.switch_rate;
        std::size_t k = 0;
        while (k + 1 < tab.cumulative.size() && !(target < tab.cumulative[k])) ++k;
        pos += tab.jumps[k];
        if (sink) sink({i, t, EventKind::jump, x, pos});
      }
    }
    out.endpoints[i] = pos;
    out.events[i] = count;
  };

  run_batched(cfg.paths, sink ? 1u : cfg.batches, run_path);
  return out;
}

std::vector<double> simulate_limit(const LimitGenerator& gen, const SimConfig& cfg) {
  if (cfg.paths == 0) throw InvalidModel("path count must be at least 1");
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw InvalidModel("horizon must be positive");
  if (gen.sigma2 < 0.0) throw NonPositiveVariance("limit variance is negative");

  const double t = cfg.horizon;
  const double sd = std::sqrt(gen.sigma2 * t);
  std::vector<double> out(cfg.paths, 0.0);
  run_batched(cfg.paths, cfg.batches, [&](std::size_t i) {
    Rng rng = substream(cfg.seed, i);
    std::normal_distribution<double> normal(0.0, 1.0);
    double pos = cfg.u0 + gen.drift * t + sd * normal(rng);
    for (const Atom& atom : gen.measure) {
      if (atom.rate <= 0.0) continue;
      std::poisson_distribution<long long> count(atom.rate * t);
      pos += atom.jump * static_cast<double>(count(rng));
    }
    out[i] = pos;
  });
  return out;
}

std::vector<ScgfEstimate> estimate_scgf(std::span<const double> endpoints, double eps,
                                        std::span<const double> lambdas) {
  if (endpoints.empty()) throw DegenerateSample("no endpoints to estimate from");
  if (!(eps > 0.0)) throw InvalidModel("eps must be positive");
  for (double v : endpoints) {
    if (!std::isfinite(v)) throw DegenerateSample("non-finite endpoint in sample");
  }
  const double n = static_cast<double>(endpoints.size());
  std::vector<ScgfEstimate> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const kernels::ExpMoments m = kernels::exp_moments(endpoints, lambda / eps);
    const double mean_w = m.sum1 / n;
    double var_w = m.sum2 / n - mean_w * mean_w;
    var_w = endpoints.size() > 1 ? std::max(0.0, var_w) * n / (n - 1.0) : 0.0;
    ScgfEstimate est;
    est.lambda = lambda;
    est.value = eps * (m.shift + std::log(mean_w));
    est.std_error = eps * std::sqrt(var_w / n) / mean_w;
    est.n_effective = m.sum1 * m.sum1 / m.sum2;
    out.push_back(est);
  }
  return out;
}

SampleStats sample_stats(std::span<const double> x) {
  SampleStats s;
  if (x.empty()) return s;
  const kernels::CentralSums c = kernels::central_sums(x);
  const double n = static_cast<double>(x.size());
  s.mean = c.mean;
  if (x.size() < 2) return s;
  s.variance = c.m2 / (n - 1.0);
  s.mean_se = std::sqrt(s.variance / n);
  const double mu2 = c.m2 / n;
  s.variance_se = std::sqrt(std::max(0.0, c.m4 / n - mu2 * mu2) / n);
  return s;
}

void write_endpoints_csv(std::span<const double> endpoints, std::ostream& out) {
  out << "path_index,endpoint\n";
  for (std::size_t i = 0; i < endpoints.size(); ++i) out << i << ',' << format_double(endpoints[i]) << '\n';
}

void write_scgf_csv(std::span<const ScgfEstimate> rows, std::ostream& out) {
  out << "lambda,scgf,std_error,n_effective\n";
  for (const ScgfEstimate& r : rows) {
    out << format_double(r.lambda) << ',' << format_double(r.value) << ',' << format_double(r.std_error) << ','
        << format_double(r.n_effective) << '\n';
  }
}

}  // namespace levyld
