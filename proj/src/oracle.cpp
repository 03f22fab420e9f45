#include "mgcc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgcc/errors.hpp"
#include "mgcc/kernels.hpp"

namespace mgcc {

void CtmcSpec::validate() const {
  for (const Transition& t : transitions) {
    if (t.from >= states || t.to >= states) throw ContractError("transition references unknown state");
    if (t.from == t.to) throw ContractError("self-loop in CTMC transition list");
    if (!(t.rate >= 0.0) || !std::isfinite(t.rate)) throw ContractError("transition rate must be >= 0");
  }
}

std::size_t CtmcSpec::bandwidth() const {
  std::size_t bw = 0;
  for (const Transition& t : transitions) {
    if (t.rate > 0.0) bw = std::max(bw, t.from > t.to ? t.from - t.to : t.to - t.from);
  }
  return bw;
}

double balance_residual(const CtmcSpec& chain, std::span<const double> pi) {
  if (pi.size() != chain.states) throw ContractError("balance_residual: length mismatch");
  std::vector<double> r(chain.states, 0.0);
  for (const Transition& t : chain.transitions) {
    const double f = pi[t.from] * t.rate;
    r[t.to] += f;
    r[t.from] -= f;
  }
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, std::fabs(v));
  return worst;
}

std::vector<double> dense_generator(const CtmcSpec& chain) {
  chain.validate();
  const std::size_t n = chain.states;
  std::vector<double> q(n * n, 0.0);
  for (const Transition& t : chain.transitions) {
    q[t.from * n + t.to] += t.rate;
    q[t.from * n + t.from] -= t.rate;
  }
  return q;
}

std::vector<double> solve_stationary(const CtmcSpec& chain) {
  chain.validate();
  const std::size_t n = chain.states;
  if (n == 0) throw ContractError("chain has no states");
  if (n == 1) return {1.0};

  // Unknowns x_1..x_{n-1} with x_0 = 1; equation i (i >= 1) is column i of
  // π Q = 0, i.e. Σ_j x_j Q[j][i] = 0. Reduced index r = i - 1.
  const std::size_t m = n - 1;
  const std::size_t bw = std::max<std::size_t>(chain.bandwidth(), 1);
  const std::size_t width = 2 * bw + 1;
  std::vector<double> band(m * width, 0.0);
  std::vector<double> rhs(m, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return band[r * width + (c + bw - r)]; };

  for (const Transition& t : chain.transitions) {
    if (t.rate == 0.0) continue;
    // Q[from][to] += rate lands in equation `to`; Q[from][from] -= rate in equation `from`.
    if (t.to != 0) {
      if (t.from == 0) {
        rhs[t.to - 1] -= t.rate;
      } else {
        at(t.to - 1, t.from - 1) += t.rate;
      }
    }
    if (t.from != 0) at(t.from - 1, t.from - 1) -= t.rate;
  }

  for (std::size_t k = 0; k < m; ++k) {
    const double pivot = at(k, k);
    if (pivot == 0.0) {
      throw DomainError("CTMC is reducible: state " + std::to_string(k + 1) + " has no outflow");
    }
    const std::size_t last_col = std::min(m - 1, k + bw);
    const std::size_t len = last_col - k + 1;
    const std::span<const double> pivot_row(&at(k, k), len);
    for (std::size_t r = k + 1; r <= std::min(m - 1, k + bw); ++r) {
      const double factor = at(r, k) / pivot;
      if (factor == 0.0) continue;
      kernels::axpy(-factor, pivot_row, std::span<double>(&at(r, k), len));
      rhs[r] -= factor * rhs[k];
    }
  }

  std::vector<double> x(n, 0.0);
  x[0] = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const std::size_t last_col = std::min(m - 1, k + bw);
    double acc = rhs[k];
    if (last_col > k) {
      acc -= kernels::dot(std::span<const double>(&at(k, k + 1), last_col - k),
                          std::span<const double>(&x[k + 2], last_col - k));
    }
    x[k + 1] = acc / at(k, k);
  }

  const double scale_max = kernels::max(x);
  for (double& v : x) {
    if (v < 0.0) {
      if (v < -1e-12 * scale_max) throw DomainError("stationary solve produced negative mass");
      v = 0.0;
    }
  }
  kernels::scale(1.0 / kernels::sum(x), x);
  kernels::scale(1.0 / kernels::sum(x), x);
  return x;
}

StationaryDistribution birth_death_stationary(double lambda, std::span<const double> death_rates) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("birth_death_stationary: lambda must be >= 0");
  for (double q : death_rates) {
    if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("birth_death_stationary: death rates must be > 0");
  }
  const std::size_t c = death_rates.size();
  std::vector<double> pi(c + 1, 0.0);
  if (lambda == 0.0) {
    pi[0] = 1.0;
    return StationaryDistribution(std::move(pi), DistributionSource::CtmcOracle);
  }
  std::vector<double> log_pi(c + 1, 0.0);
  const double log_lambda = std::log(lambda);
  for (std::size_t n = 1; n <= c; ++n) log_pi[n] = log_pi[n - 1] + log_lambda - std::log(death_rates[n - 1]);
  const double top = *std::max_element(log_pi.begin(), log_pi.end());
  double total = 0.0;
  for (std::size_t n = 0; n <= c; ++n) {
    pi[n] = std::exp(log_pi[n] - top);
    total += pi[n];
  }
  for (double& p : pi) p /= total;
  double again = 0.0;
  for (double p : pi) again += p;
  for (double& p : pi) p /= again;
  return StationaryDistribution(std::move(pi), DistributionSource::CtmcOracle);
}

CtmcSpec birth_death_chain(double lambda, std::span<const double> death_rates) {
  CtmcSpec chain;
  chain.states = death_rates.size() + 1;
  for (std::size_t n = 0; n < death_rates.size(); ++n) {
    chain.transitions.push_back({n, n + 1, lambda});
    chain.transitions.push_back({n + 1, n, death_rates[n]});
  }
  return chain;
}

CtmcSpec joint_tandem_chain(const TandemConfig& cfg) {
  const int c1 = cfg.c1();
  const int c2 = cfg.c2();
  const FundamentalDiagram& s1 = cfg.section1();
  const FundamentalDiagram& s2 = cfg.section2();
  CtmcSpec chain;
  chain.states = static_cast<std::size_t>(c1 + 1) * static_cast<std::size_t>(c2 + 1);
  for (int n1 = 0; n1 <= c1; ++n1) {
    for (int n2 = 0; n2 <= c2; ++n2) {
      const std::size_t s = joint_index(n1, n2, c2);
      if (n1 < c1 && cfg.lambda() > 0.0) chain.transitions.push_back({s, joint_index(n1 + 1, n2, c2), cfg.lambda()});
      if (n1 > 0 && n2 < c2) {
        chain.transitions.push_back({s, joint_index(n1 - 1, n2 + 1, c2), std::min(demand(n1, s1), supply(n2, s2))});
      }
      if (n2 > 0) chain.transitions.push_back({s, joint_index(n1, n2 - 1, c2), quadratic_flow(n2, s2)});
    }
  }
  return chain;
}

JointOracleResult joint_tandem_stationary(const TandemConfig& cfg) {
  const int c1 = cfg.c1();
  const int c2 = cfg.c2();
  const std::size_t states = static_cast<std::size_t>(c1 + 1) * static_cast<std::size_t>(c2 + 1);
  if (states > kMaxJointStates) {
    throw SizeError("joint chain has " + std::to_string(states) + " states; limit is " +
                    std::to_string(kMaxJointStates));
  }
  const CtmcSpec chain = joint_tandem_chain(cfg);
  const std::vector<double> pi = solve_stationary(chain);

  JointOracleResult out;
  out.pi = Matrix(static_cast<std::size_t>(c1) + 1, static_cast<std::size_t>(c2) + 1);
  for (int n1 = 0; n1 <= c1; ++n1) {
    for (int n2 = 0; n2 <= c2; ++n2) {
      out.pi(static_cast<std::size_t>(n1), static_cast<std::size_t>(n2)) = pi[joint_index(n1, n2, c2)];
    }
  }
  out.residual = balance_residual(chain, pi);
  out.blocking = kernels::sum(out.pi.row(static_cast<std::size_t>(c1)));
  for (int n1 = 0; n1 <= c1; ++n1) {
    for (int n2 = 0; n2 <= c2; ++n2) {
      const double p = pi[joint_index(n1, n2, c2)];
      if (n1 > 0 && n2 < c2) out.transfer_flow += p * std::min(demand(n1, cfg.section1()), supply(n2, cfg.section2()));
      if (n2 > 0) out.exit_flow += p * quadratic_flow(n2, cfg.section2());
    }
  }
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("tv_distance: length mismatch");
  return 0.5 * kernels::abs_diff_sum(p, q);
}

double tv_distance(const StationaryDistribution& p, const StationaryDistribution& q) {
  return tv_distance(p.probs(), q.probs());
}

OracleComparison compare_with_oracle(const TandemConfig& cfg) {
  const JointOracleResult joint = joint_tandem_stationary(cfg);
  const TandemSolution sol = solve_bisection(cfg);
  OracleComparison cmp;
  cmp.lambda = cfg.lambda();
  cmp.tv_p1 = tv_distance(joint.pi.row_sums(), sol.p1.probs());
  cmp.tv_p2 = tv_distance(joint.pi.column_sums(), sol.p2.probs());
  cmp.theta_decomposition = sol.fixed_point;
  cmp.theta_joint = joint.transfer_flow;
  cmp.joint_residual = joint.residual;
  return cmp;
}

}  // namespace mgcc
