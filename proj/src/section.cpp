#include "mgcc/section.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mgcc/errors.hpp"

namespace mgcc {
namespace {

void require_rate(double lambda, const char* op) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(op) + ": arrival rate must be finite and >= 0");
  }
}

}  // namespace

StationaryDistribution stationary_speed_form(double lambda, const SectionParams& p,
                                             std::span<const double> speed_profile) {
  require_rate(lambda, "stationary_speed_form");
  const int c = p.capacity();
  if (static_cast<int>(speed_profile.size()) != c) {
    throw ContractError("speed profile must have one entry per car count 1..c");
  }
  if (std::fabs(speed_profile[0] - 1.0) > 1e-12) {
    throw DomainError("speed profile must start at f(1) = 1");
  }
  if (lambda == 0.0) return StationaryDistribution::empty_system(c, DistributionSource::SpeedForm);

  const double log_load = std::log(lambda * p.length() / p.free_speed());
  std::vector<double> lw(static_cast<std::size_t>(c) + 1, 0.0);
  for (int n = 1; n <= c; ++n) {
    const double f = speed_profile[static_cast<std::size_t>(n - 1)];
    if (!(f > 0.0)) throw DomainError("speed profile must be strictly positive");
    lw[static_cast<std::size_t>(n)] = lw[static_cast<std::size_t>(n - 1)] + log_load - std::log(n * f);
  }
  return StationaryDistribution::from_log_weights(lw, DistributionSource::SpeedForm);
}

StationaryDistribution stationary_from_service_rates(double lambda, double q_max,
                                                     std::span<const double> g,
                                                     DistributionSource source,
                                                     std::optional<int> conditioned_on) {
  require_rate(lambda, "stationary distribution");
  const int c = static_cast<int>(g.size());
  if (lambda == 0.0) {
    std::vector<double> p(static_cast<std::size_t>(c) + 1, 0.0);
    p[0] = 1.0;
    return StationaryDistribution(std::move(p), source, conditioned_on);
  }
  const double log_load = std::log(lambda / q_max);
  std::vector<double> lw(static_cast<std::size_t>(c) + 1, 0.0);
  for (int i = 1; i <= c; ++i) {
    const double gi = g[static_cast<std::size_t>(i - 1)];
    if (!(gi > 0.0)) throw DomainError("normalized service rates must be > 0");
    lw[static_cast<std::size_t>(i)] = lw[static_cast<std::size_t>(i - 1)] + log_load - std::log(i * gi);
  }
  return StationaryDistribution::from_log_weights(lw, source, conditioned_on);
}

StationaryDistribution stationary_flow_form(double lambda, const FundamentalDiagram& d) {
  require_rate(lambda, "stationary_flow_form");
  const int c = d.capacity();
  std::vector<double> g(static_cast<std::size_t>(c));
  for (int i = 1; i <= c; ++i) g[static_cast<std::size_t>(i - 1)] = normalized_service_rate(i, d);
  return stationary_from_service_rates(lambda, d.q_max(), g, DistributionSource::FlowForm);
}

PerformanceReport performance_measures(double lambda, const StationaryDistribution& dist) {
  require_rate(lambda, "performance_measures");
  PerformanceReport r;
  r.arrival_rate = lambda;
  r.blocking_probability = dist.blocking();
  r.throughput = lambda * (1.0 - r.blocking_probability);
  r.expected_count = dist.mean();
  if (r.throughput > 0.0) r.expected_time = r.expected_count / r.throughput;
  return r;
}

double outflow(OutflowKind kind, int n_self, const FundamentalDiagram& d_self,
               std::optional<double> downstream_supply) {
  if ((kind == OutflowKind::Constrained) != downstream_supply.has_value()) {
    throw ContractError("downstream supply is required for, and only for, a constrained section");
  }
  const double own_demand = demand(n_self, d_self);
  switch (kind) {
    case OutflowKind::Open:
      return own_demand;
    case OutflowKind::Constrained:
      if (!(*downstream_supply >= 0.0)) throw DomainError("downstream supply must be >= 0");
      return std::min(own_demand, *downstream_supply);
    case OutflowKind::Closed:
      return std::min(own_demand, supply(n_self, d_self));
  }
  return own_demand;
}

}  // namespace mgcc
