#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mgcc/errors.hpp"
#include "mgcc/oracle.hpp"
#include "support.hpp"

using namespace mgcc;
using doctest::Approx;

namespace {

// Reference values from tests/oracles/gen_expected.py for the c1 = c2 = 4 road.
constexpr double kMiniLambda = 7.8125;
constexpr double kMiniThetaJoint = 7.8124999226561825;
constexpr double kMiniThetaDecomposition = 7.8124999226562168;
constexpr double kMiniBlocking = 9.9000085888985541e-9;

CtmcSpec random_chain(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> rate(0.1, 5.0);
  CtmcSpec c;
  c.states = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    c.transitions.push_back({i, i + 1, rate(rng)});
    c.transitions.push_back({i + 1, i, rate(rng)});
    if (i + 2 < n) c.transitions.push_back({i, i + 2, rate(rng)});
  }
  return c;
}

}  // namespace

TEST_CASE("spec validation") {
  CtmcSpec c;
  c.states = 3;
  c.transitions = {{0, 0, 1.0}};
  CHECK_THROWS_AS(c.validate(), ContractError);
  c.transitions = {{0, 3, 1.0}};
  CHECK_THROWS_AS(c.validate(), ContractError);
  c.transitions = {{0, 1, -1.0}};
  CHECK_THROWS_AS(c.validate(), ContractError);
  c.transitions = {{0, 2, 1.0}, {2, 1, 1.0}, {1, 0, 0.0}};
  CHECK(c.bandwidth() == 2);
}

TEST_CASE("generator rows sum to zero") {
  std::mt19937_64 rng(7);
  const CtmcSpec c = random_chain(rng, 6);
  const auto q = dense_generator(c);
  for (std::size_t r = 0; r < 6; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < 6; ++k) s += q[r * 6 + k];
    CHECK(std::fabs(s) < 1e-12);
  }
}

TEST_CASE("banded solve satisfies global balance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const CtmcSpec c = random_chain(rng, 3 + static_cast<std::size_t>(trial));
    const auto pi = solve_stationary(c);
    double total = 0.0;
    for (double p : pi) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == Approx(1.0).epsilon(1e-13));
    CHECK(balance_residual(c, pi) < 1e-12);
  }
}

TEST_CASE("birth-death closed form equals the generator solve") {
  const auto d = test::reference_section2();
  const std::vector<double> q(d.flows().begin() + 1, d.flows().end());
  for (double lambda : {0.0, 50.0, 2000.0, 9000.0}) {
    const auto closed = birth_death_stationary(lambda, q);
    const auto numeric = solve_stationary(birth_death_chain(lambda, q));
    CHECK(closed.source() == DistributionSource::CtmcOracle);
    CHECK(test::max_abs_diff(closed.probs(), numeric) < 1e-12);
    CHECK(balance_residual(birth_death_chain(lambda, q), closed.probs()) < 1e-9 * std::max(1.0, lambda));
  }
  const std::vector<double> bad{1.0, 0.0};
  CHECK_THROWS_AS(birth_death_stationary(1.0, bad), DomainError);
  CHECK_THROWS_AS(birth_death_stationary(-1.0, q), DomainError);
}

TEST_CASE("joint tandem chain") {
  SUBCASE("structure") {
    const auto cfg = test::mini_tandem(kMiniLambda);
    const CtmcSpec c = joint_tandem_chain(cfg);
    CHECK(c.states == 25);
    CHECK(c.bandwidth() == 5);
    for (const Transition& t : c.transitions) {
      // no transfers into a full downstream section
      const bool transfer = t.from > t.to && t.from - t.to == 4;
      if (transfer) CHECK(t.from % 5 != 4);
    }
  }
  SUBCASE("small road against 50-digit reference") {
    const auto cfg = test::mini_tandem(kMiniLambda);
    const JointOracleResult r = joint_tandem_stationary(cfg);
    CHECK(std::fabs(r.transfer_flow - kMiniThetaJoint) < 1e-10);
    CHECK(test::rel_err(r.blocking, kMiniBlocking) < 1e-6);
    CHECK(r.residual < 1e-10);
    CHECK(r.pi.total() == Approx(1.0).epsilon(1e-13));
    const OracleComparison cmp = compare_with_oracle(cfg);
    CHECK(std::fabs(cmp.theta_decomposition - kMiniThetaDecomposition) < 1e-6);
    CHECK(cmp.tv_p1 < 1e-8);
    CHECK(cmp.tv_p2 < 1e-8);
  }
  SUBCASE("flow conservation on the reference road") {
    for (double lambda : {500.0, 2000.0, 3000.0}) {
      const auto cfg = test::reference_tandem(lambda);
      const JointOracleResult r = joint_tandem_stationary(cfg);
      CAPTURE(lambda);
      CHECK(r.residual < 1e-9 * lambda);
      CHECK(test::rel_err(r.transfer_flow, r.exit_flow) < 1e-9);
      CHECK(test::rel_err(r.transfer_flow, lambda * (1.0 - r.blocking)) < 1e-9);
    }
  }
  SUBCASE("decomposition is exact in light traffic") {
    const OracleComparison cmp = compare_with_oracle(test::reference_tandem(500.0));
    CHECK(cmp.tv_p1 < 1e-6);
    CHECK(cmp.tv_p2 < 1e-6);
    CHECK(std::fabs(cmp.theta_decomposition - cmp.theta_joint) / 500.0 < 1e-6);
  }
  SUBCASE("size guard") {
    const auto big = FundamentalDiagram::linear(SectionParams(1.0, 100.0, 250.0));
    const TandemConfig cfg(big, big, 100.0);
    CHECK_THROWS_AS(joint_tandem_stationary(cfg), SizeError);
  }
}

TEST_CASE("total variation") {
  const std::vector<double> a{0.5, 0.5, 0.0};
  const std::vector<double> b{0.0, 0.5, 0.5};
  CHECK(tv_distance(a, b) == 0.5);
  CHECK(tv_distance(a, a) == 0.0);
  const std::vector<double> c{1.0};
  CHECK_THROWS_AS(tv_distance(a, c), ContractError);
}
