#pragma once

// Two road sections in tandem: a constrained upstream section (1) feeding a
// closed downstream section (2).
//
// Section 2 sees Poisson arrivals at the transfer rate θ and is analysed as a
// single closed section. Section 1, conditioned on n2 cars downstream, has
// outflow min(Δ1(n1), Σ2(n2)); mixing those conditionals over P2(θ) gives its
// marginal. θ itself must satisfy θ = h(θ) = λ (1 - P1_{c1}(λ, θ)).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mgcc/diagram.hpp"
#include "mgcc/distribution.hpp"
#include "mgcc/section.hpp"

namespace mgcc {

class TandemConfig {
 public:
  /// Both diagrams must be LinearQuadratic and λ >= 0 (DomainError otherwise).
  TandemConfig(FundamentalDiagram section1, FundamentalDiagram section2, double lambda);

  const FundamentalDiagram& section1() const noexcept { return s1_; }
  const FundamentalDiagram& section2() const noexcept { return s2_; }
  double lambda() const noexcept { return lambda_; }
  int c1() const noexcept { return s1_.capacity(); }
  int c2() const noexcept { return s2_.capacity(); }

  TandemConfig with_lambda(double lambda) const { return {s1_, s2_, lambda}; }

  /// Default solver tolerance, 1e-6 · q_max1 (veh/h).
  double default_tolerance() const noexcept { return 1e-6 * s1_.q_max(); }

 private:
  FundamentalDiagram s1_;
  FundamentalDiagram s2_;
  double lambda_;
};

/// P2(θ): section 2 as a closed section fed at rate θ.
StationaryDistribution p2_given_theta(double theta, const TandemConfig& cfg);

/// g1(i1, i2) = min(Δ1(i1), Σ2(i2)) / q_max1 / i1.
double g1_coupled(int i1, int i2, const TandemConfig& cfg);

/// P(N1 = · | N2 = n2) at arrival rate λ; independent of θ.
StationaryDistribution p1_conditional(double lambda, int n2, const TandemConfig& cfg);

/// All conditionals as a (c1+1)×(c2+1) matrix, column n2 = p1_conditional(λ, n2).
Matrix p1_conditional_matrix(double lambda, const TandemConfig& cfg);

/// Σ_{n2=0..c2} P(n1 | n2) P2_{n2}(θ).
StationaryDistribution p1_marginal(double lambda, double theta, const TandemConfig& cfg);

/// h(θ) = λ (1 - P1_{c1}(λ, θ)) for θ in [0, λ].
double h(double theta, const TandemConfig& cfg);

/// δ = θ (1 - P2_{c2}(θ)).
double delta_throughput(double theta, const TandemConfig& cfg);

/// S(θ) = Σ_{n2} P(c1 | n2) P2_{n2}(θ) (n2 - n̄2(θ)), θ > 0. dh/dθ = -(λ/θ) S.
double s_statistic(double theta, const TandemConfig& cfg);

/// Analytic dP2_{n2}/dθ = P2_{n2}(θ) (n2 - n̄2(θ)) / θ, θ > 0.
std::vector<double> p2_derivative(double theta, const TandemConfig& cfg);

struct Theorem2Report {
  bool satisfied = false;  // s < bound
  double s = 0.0;
  double bound = 0.0;  // θ / λ
};

/// Sufficient condition for the fixed-point iteration to be contractive at θ.
Theorem2Report theorem2_condition(double theta, const TandemConfig& cfg);

/// Joint P(n1, n2) = P(n1 | n2) P2_{n2}.
Matrix joint_distribution(const Matrix& p1_given_2, const StationaryDistribution& p2);

/// Precomputes the θ-independent conditional matrix so repeated h(θ)
/// evaluations only cost one section-2 solve and one dot product.
class TandemModel {
 public:
  explicit TandemModel(TandemConfig cfg);

  const TandemConfig& config() const noexcept { return cfg_; }
  double lambda() const noexcept { return cfg_.lambda(); }
  const Matrix& conditional() const noexcept { return conditional_; }

  StationaryDistribution p2(double theta) const;
  StationaryDistribution p1(double theta) const;
  double h(double theta) const;
  double e(double theta) const { return h(theta) - theta; }
  double s_statistic(double theta) const;
  /// dh/dθ = -(λ/θ) S(θ)
  double dh_dtheta(double theta) const;

 private:
  void check_theta(double theta) const;

  TandemConfig cfg_;
  Matrix conditional_;
};

enum class SolveMode { ConvergedIteration, BisectionRoot, OscillatoryAveraged };

std::string to_string(SolveMode m);

struct TandemSolution {
  double lambda = 0.0;
  /// Reported transfer throughput. Equals the fixed point except in
  /// OscillatoryAveraged mode, where it is (λ + h(λ)) / 2.
  double theta = 0.0;
  /// Fixed point θ* used for every distribution and for δ.
  double fixed_point = 0.0;
  /// |h(θ*) - θ*|
  double residual = 0.0;
  double delta = 0.0;
  SolveMode mode = SolveMode::BisectionRoot;
  std::vector<double> trace;
  /// Limit points of a detected 2-cycle.
  std::optional<std::pair<double, double>> adherence;
  StationaryDistribution p1 =
      StationaryDistribution::empty_system(0, DistributionSource::TandemMarginal);
  StationaryDistribution p2 = StationaryDistribution::empty_system(0, DistributionSource::FlowForm);
  Matrix p1_given_2;
  Matrix joint;
  PerformanceReport section1;  // offered λ, throughput λ(1 - P1_{c1})
  PerformanceReport section2;  // offered θ*, throughput δ
};

/// Bisection on e(θ) = h(θ) - θ over [0, λ]; returns θ* with |e(θ*)| <= tol.
TandemSolution solve_bisection(const TandemConfig& cfg, double tol);
TandemSolution solve_bisection(const TandemConfig& cfg);

struct IterationOptions {
  std::optional<double> theta0;  // default λ
  int max_iter = 10000;
  std::optional<double> tol;  // default 1e-6 · q_max1
};

/// Plain fixed-point iteration θ_k = h(θ_{k-1}). Stops on |θ_k - θ_{k-1}| <= tol
/// (ConvergedIteration) or on a 2-cycle seen for three consecutive steps
/// (OscillatoryAveraged). Throws NonConvergenceError otherwise.
TandemSolution solve_iteration(const TandemConfig& cfg, const IterationOptions& opts = {});

}  // namespace mgcc
