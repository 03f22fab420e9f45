#pragma once

// Exact Markov-chain references: the birth-death chain of a single section
// and the full (n1, n2) chain of a tandem, solved without the decomposition.

#include <cstddef>
#include <span>
#include <vector>

#include "mgcc/distribution.hpp"
#include "mgcc/tandem.hpp"

namespace mgcc {

struct Transition {
  std::size_t from;
  std::size_t to;
  double rate;
};

/// Continuous-time Markov chain on states 0..states-1 given as a list of
/// transitions. Duplicate (from, to) pairs add up.
struct CtmcSpec {
  std::size_t states = 0;
  std::vector<Transition> transitions;

  /// Throws ContractError on self-loops, out-of-range states or negative rates.
  void validate() const;
  /// max |from - to| over transitions with positive rate.
  std::size_t bandwidth() const;
};

/// ‖π Q‖∞ for the chain's generator Q.
double balance_residual(const CtmcSpec& chain, std::span<const double> pi);

/// Dense generator, row-major states×states. For small chains and tests.
std::vector<double> dense_generator(const CtmcSpec& chain);

/// Stationary vector by banded Gaussian elimination on Qᵀ with π_0 pinned,
/// then normalized. Requires every state other than 0 to have outflow and
/// the chain to be irreducible on the states reachable to/from 0.
std::vector<double> solve_stationary(const CtmcSpec& chain);

/// π_n / π_{n-1} = λ / q_n in log domain; death_rates[n-1] = q_n.
StationaryDistribution birth_death_stationary(double lambda, std::span<const double> death_rates);

/// Birth-death generator chain matching birth_death_stationary.
CtmcSpec birth_death_chain(double lambda, std::span<const double> death_rates);

/// State index of (n1, n2) in joint chains: n1 (c2 + 1) + n2.
inline std::size_t joint_index(int n1, int n2, int c2) {
  return static_cast<std::size_t>(n1) * static_cast<std::size_t>(c2 + 1) + static_cast<std::size_t>(n2);
}

/// Exact tandem chain: arrivals λ into section 1 (blocked at c1), transfers at
/// min(Δ1(n1), Σ2(n2)) while n2 < c2, departures at q2(n2).
CtmcSpec joint_tandem_chain(const TandemConfig& cfg);

struct JointOracleResult {
  Matrix pi;                  // (c1+1)×(c2+1)
  double residual = 0.0;      // ‖π Q‖∞
  double blocking = 0.0;      // Σ_{n2} π(c1, n2)
  double transfer_flow = 0.0; // Σ π(n1, n2) · transfer rate, veh/h
  double exit_flow = 0.0;     // Σ π(n1, n2) · q2(n2), veh/h
};

inline constexpr std::size_t kMaxJointStates = 40000;

/// Throws SizeError when (c1+1)(c2+1) exceeds kMaxJointStates.
JointOracleResult joint_tandem_stationary(const TandemConfig& cfg);

/// ½ Σ |p_n - q_n|; ContractError on length mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);
double tv_distance(const StationaryDistribution& p, const StationaryDistribution& q);

struct OracleComparison {
  double lambda = 0.0;
  double tv_p1 = 0.0;
  double tv_p2 = 0.0;
  double theta_decomposition = 0.0;
  double theta_joint = 0.0;
  double joint_residual = 0.0;
};

/// Decomposition (bisection, default tolerance) against the exact chain.
OracleComparison compare_with_oracle(const TandemConfig& cfg);

}  // namespace mgcc
