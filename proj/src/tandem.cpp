#include "mgcc/tandem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mgcc/errors.hpp"
#include "mgcc/kernels.hpp"

namespace mgcc {
namespace {

void require_nonnegative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be finite and >= 0");
  }
}

// Column n2 of the conditional matrix holds P(· | n2); rows are n1.
Matrix build_conditional(double lambda, const TandemConfig& cfg) {
  const int c1 = cfg.c1();
  const int c2 = cfg.c2();
  Matrix m(static_cast<std::size_t>(c1) + 1, static_cast<std::size_t>(c2) + 1);
  for (int n2 = 0; n2 <= c2; ++n2) {
    const StationaryDistribution col = p1_conditional(lambda, n2, cfg);
    for (int n1 = 0; n1 <= c1; ++n1) {
      m(static_cast<std::size_t>(n1), static_cast<std::size_t>(n2)) = col[static_cast<std::size_t>(n1)];
    }
  }
  return m;
}

StationaryDistribution mix(const Matrix& conditional, const StationaryDistribution& p2) {
  std::vector<double> p1(conditional.rows());
  for (std::size_t n1 = 0; n1 < p1.size(); ++n1) p1[n1] = kernels::dot(conditional.row(n1), p2.probs());
  return StationaryDistribution(std::move(p1), DistributionSource::TandemMarginal);
}

// P2_{n2}(θ) (n2 - n̄2(θ)), the θ·dP2/dθ vector.
std::vector<double> centered_p2(const StationaryDistribution& p2) {
  const double mean = p2.mean();
  std::vector<double> w(p2.probs().begin(), p2.probs().end());
  for (std::size_t n2 = 0; n2 < w.size(); ++n2) w[n2] *= static_cast<double>(n2) - mean;
  return w;
}

TandemSolution assemble(const TandemModel& model, double fixed_point) {
  TandemSolution sol;
  sol.lambda = model.lambda();
  sol.fixed_point = fixed_point;
  sol.theta = fixed_point;
  sol.p2 = model.p2(fixed_point);
  sol.p1 = mix(model.conditional(), sol.p2);
  sol.residual = std::fabs(model.lambda() * (1.0 - sol.p1.blocking()) - fixed_point);
  sol.p1_given_2 = model.conditional();
  sol.joint = joint_distribution(model.conditional(), sol.p2);
  sol.delta = fixed_point * (1.0 - sol.p2.blocking());
  sol.section1 = performance_measures(model.lambda(), sol.p1);
  sol.section2 = performance_measures(fixed_point, sol.p2);
  return sol;
}

double bisect(const TandemModel& model, double tol) {
  const double lambda = model.lambda();
  if (std::fabs(model.e(lambda)) <= tol) return lambda;
  double lo = 0.0;
  double hi = lambda;
  if (std::fabs(model.e(lo)) <= tol) return lo;
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double em = model.e(mid);
    if (std::fabs(em) <= tol) return mid;
    (em > 0.0 ? lo : hi) = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * lambda) break;
  }
  return mid;
}

}  // namespace

TandemConfig::TandemConfig(FundamentalDiagram section1, FundamentalDiagram section2, double lambda)
    : s1_(std::move(section1)), s2_(std::move(section2)), lambda_(lambda) {
  if (s1_.model() != SpeedModel::LinearQuadratic || s2_.model() != SpeedModel::LinearQuadratic) {
    throw DomainError("tandem sections must use the linear/quadratic diagram");
  }
  require_nonnegative(lambda_, "arrival rate");
}

StationaryDistribution p2_given_theta(double theta, const TandemConfig& cfg) {
  require_nonnegative(theta, "theta");
  return stationary_flow_form(theta, cfg.section2());
}

double g1_coupled(int i1, int i2, const TandemConfig& cfg) {
  if (i1 < 1 || i1 > cfg.c1()) throw DomainError("g1_coupled: i1 outside [1, c1]");
  if (i2 < 0 || i2 > cfg.c2()) throw DomainError("g1_coupled: i2 outside [0, c2]");
  const double transfer = std::min(demand(i1, cfg.section1()), supply(i2, cfg.section2()));
  return transfer / cfg.section1().q_max() / i1;
}

StationaryDistribution p1_conditional(double lambda, int n2, const TandemConfig& cfg) {
  require_nonnegative(lambda, "arrival rate");
  if (n2 < 0 || n2 > cfg.c2()) throw DomainError("p1_conditional: n2 outside [0, c2]");
  const int c1 = cfg.c1();
  std::vector<double> g(static_cast<std::size_t>(c1));
  for (int i = 1; i <= c1; ++i) g[static_cast<std::size_t>(i - 1)] = g1_coupled(i, n2, cfg);
  return stationary_from_service_rates(lambda, cfg.section1().q_max(), g,
                                       DistributionSource::TandemConditional, n2);
}

Matrix p1_conditional_matrix(double lambda, const TandemConfig& cfg) {
  require_nonnegative(lambda, "arrival rate");
  return build_conditional(lambda, cfg);
}

StationaryDistribution p1_marginal(double lambda, double theta, const TandemConfig& cfg) {
  require_nonnegative(lambda, "arrival rate");
  require_nonnegative(theta, "theta");
  return mix(build_conditional(lambda, cfg), p2_given_theta(theta, cfg));
}

double h(double theta, const TandemConfig& cfg) { return TandemModel(cfg).h(theta); }

double delta_throughput(double theta, const TandemConfig& cfg) {
  return theta * (1.0 - p2_given_theta(theta, cfg).blocking());
}

double s_statistic(double theta, const TandemConfig& cfg) { return TandemModel(cfg).s_statistic(theta); }

std::vector<double> p2_derivative(double theta, const TandemConfig& cfg) {
  if (!(theta > 0.0)) throw DomainError("p2_derivative: theta must be > 0");
  std::vector<double> d = centered_p2(p2_given_theta(theta, cfg));
  kernels::scale(1.0 / theta, d);
  return d;
}

Theorem2Report theorem2_condition(double theta, const TandemConfig& cfg) {
  if (!(cfg.lambda() > 0.0)) throw DomainError("theorem2_condition: lambda must be > 0");
  Theorem2Report r;
  r.s = s_statistic(theta, cfg);
  r.bound = theta / cfg.lambda();
  r.satisfied = r.s < r.bound;
  return r;
}

Matrix joint_distribution(const Matrix& p1_given_2, const StationaryDistribution& p2) {
  if (p1_given_2.cols() != p2.probs().size()) {
    throw ContractError("joint_distribution: conditional columns must match section-2 states");
  }
  Matrix joint(p1_given_2.rows(), p1_given_2.cols());
  for (std::size_t n1 = 0; n1 < joint.rows(); ++n1) {
    for (std::size_t n2 = 0; n2 < joint.cols(); ++n2) joint(n1, n2) = p1_given_2(n1, n2) * p2[n2];
  }
  return joint;
}

TandemModel::TandemModel(TandemConfig cfg)
    : cfg_(std::move(cfg)), conditional_(build_conditional(cfg_.lambda(), cfg_)) {}

void TandemModel::check_theta(double theta) const {
  if (!(theta >= 0.0) || theta > cfg_.lambda()) {
    throw DomainError("theta must lie in [0, lambda]");
  }
}

StationaryDistribution TandemModel::p2(double theta) const { return p2_given_theta(theta, cfg_); }

StationaryDistribution TandemModel::p1(double theta) const { return mix(conditional_, p2(theta)); }

double TandemModel::h(double theta) const {
  check_theta(theta);
  const double blocking = kernels::dot(conditional_.row(conditional_.rows() - 1), p2(theta).probs());
  return cfg_.lambda() * (1.0 - blocking);
}

// Cov(1{N > k}, N) for k = 0..c-1, written as F_k Σ_{j>=k} T_j + T_k Σ_{j<k} F_j
// with F_k = P(N <= k) and T_k = P(N > k) both accumulated directly, so every
// term is non-negative and nothing cancels in light traffic.
static std::vector<double> tail_covariances(std::span<const double> p) {
  const std::size_t c = p.size() - 1;
  std::vector<double> below(c), above(c), above_suffix(c);
  double acc = 0.0;
  for (std::size_t k = 0; k < c; ++k) below[k] = acc += p[k];
  acc = 0.0;
  for (std::size_t k = c; k-- > 0;) above[k] = acc += p[k + 1];
  acc = 0.0;
  for (std::size_t k = c; k-- > 0;) above_suffix[k] = acc += above[k];

  std::vector<double> w(c);
  double below_before_k = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    w[k] = below[k] * above_suffix[k] + above[k] * below_before_k;
    below_before_k += below[k];
  }
  return w;
}

double TandemModel::s_statistic(double theta) const {
  if (!(theta > 0.0)) throw DomainError("s_statistic: theta must be > 0");
  const StationaryDistribution dist = p2(theta);
  if (dist.capacity() == 0) return 0.0;
  const auto blocked = conditional_.row(conditional_.rows() - 1);
  std::vector<double> increments(blocked.size() - 1);
  for (std::size_t k = 0; k < increments.size(); ++k) increments[k] = blocked[k + 1] - blocked[k];
  return kernels::dot(increments, tail_covariances(dist.probs()));
}

double TandemModel::dh_dtheta(double theta) const {
  return -(cfg_.lambda() / theta) * s_statistic(theta);
}

std::string to_string(SolveMode m) {
  switch (m) {
    case SolveMode::ConvergedIteration: return "ConvergedIteration";
    case SolveMode::BisectionRoot: return "BisectionRoot";
    case SolveMode::OscillatoryAveraged: return "OscillatoryAveraged";
  }
  return "Unknown";
}

TandemSolution solve_bisection(const TandemConfig& cfg, double tol) {
  if (!(tol > 0.0)) throw DomainError("solve_bisection: tol must be > 0");
  const TandemModel model(cfg);
  if (cfg.lambda() == 0.0) {
    TandemSolution sol = assemble(model, 0.0);
    sol.mode = SolveMode::BisectionRoot;
    return sol;
  }
  TandemSolution sol = assemble(model, bisect(model, tol));
  sol.mode = SolveMode::BisectionRoot;
  return sol;
}

TandemSolution solve_bisection(const TandemConfig& cfg) {
  return solve_bisection(cfg, cfg.default_tolerance());
}

TandemSolution solve_iteration(const TandemConfig& cfg, const IterationOptions& opts) {
  const double lambda = cfg.lambda();
  const double tol = opts.tol.value_or(cfg.default_tolerance());
  const double theta0 = opts.theta0.value_or(lambda);
  if (!(tol > 0.0)) throw DomainError("solve_iteration: tol must be > 0");
  if (opts.max_iter < 1) throw DomainError("solve_iteration: max_iter must be >= 1");
  if (!(theta0 >= 0.0) || theta0 > lambda) throw DomainError("solve_iteration: theta0 outside [0, lambda]");

  const TandemModel model(cfg);
  std::vector<double> trace{theta0};
  if (lambda == 0.0) {
    TandemSolution sol = assemble(model, 0.0);
    sol.mode = SolveMode::ConvergedIteration;
    sol.trace = std::move(trace);
    return sol;
  }

  constexpr int kCycleConfirmations = 3;
  int cycle_streak = 0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    const double next = model.h(trace.back());
    const double prev = trace.back();
    trace.push_back(next);

    if (std::fabs(next - prev) <= tol) {
      TandemSolution sol = assemble(model, next);
      sol.mode = SolveMode::ConvergedIteration;
      sol.trace = std::move(trace);
      return sol;
    }
    const bool two_cycle = k >= 2 && std::fabs(next - trace[trace.size() - 3]) <= tol;
    cycle_streak = two_cycle ? cycle_streak + 1 : 0;
    if (cycle_streak >= kCycleConfirmations) {
      // The iterate average is reported; distributions use the true root.
      TandemSolution sol = assemble(model, bisect(model, tol));
      sol.mode = SolveMode::OscillatoryAveraged;
      sol.theta = 0.5 * (lambda + model.h(lambda));
      sol.adherence = std::pair{std::min(prev, next), std::max(prev, next)};
      sol.trace = std::move(trace);
      return sol;
    }
  }
  throw NonConvergenceError("fixed-point iteration did not converge in " +
                                std::to_string(opts.max_iter) + " iterations",
                            std::move(trace));
}

}  // namespace mgcc
