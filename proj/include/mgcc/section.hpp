#pragma once

// Stationary analysis of a single M/G/c/c state-dependent section.

#include <optional>
#include <span>

#include "mgcc/diagram.hpp"
#include "mgcc/distribution.hpp"

namespace mgcc {

struct PerformanceReport {
  double arrival_rate = 0.0;          // veh/h offered to the section
  double blocking_probability = 0.0;  // P_c
  double throughput = 0.0;            // veh/h, arrival_rate (1 - P_c)
  double expected_count = 0.0;        // cars
  /// hours; empty when throughput is zero (Little's law undefined).
  std::optional<double> expected_time;

  bool expected_time_defined() const noexcept { return expected_time.has_value(); }
};

/// P_n ∝ (λ L / v1)^n / Π_{i<=n} i f(i), f(i) = v_i / v_1 given as
/// speed_profile[i-1]. λ in veh/h; throws DomainError for λ < 0 or a
/// profile that is not positive with f(1) = 1.
StationaryDistribution stationary_speed_form(double lambda, const SectionParams& p,
                                             std::span<const double> speed_profile);

/// P_n ∝ (λ / q_max)^n / Π_{i<=n} i g(i), g(i) = (q_i/q_max)/i.
StationaryDistribution stationary_flow_form(double lambda, const FundamentalDiagram& d);

/// Same product form for an arbitrary normalized service-rate sequence,
/// g[i-1] = g(i) for i = 1..c. Shared by the tandem conditional distributions.
StationaryDistribution stationary_from_service_rates(double lambda, double q_max,
                                                     std::span<const double> g,
                                                     DistributionSource source,
                                                     std::optional<int> conditioned_on = std::nullopt);

PerformanceReport performance_measures(double lambda, const StationaryDistribution& dist);

enum class OutflowKind { Open, Constrained, Closed };

/// Section outflow under the three boundary rules:
///   Open        -> demand(n)
///   Constrained -> min(demand(n), downstream supply)
///   Closed      -> min(demand(n), supply(n)) = q_n
/// downstream_supply must be given exactly when kind is Constrained.
double outflow(OutflowKind kind, int n_self, const FundamentalDiagram& d_self,
               std::optional<double> downstream_supply = std::nullopt);

}  // namespace mgcc
