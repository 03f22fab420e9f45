#pragma once

// Section parameters and the deterministic traffic laws built on them.
//
// Units are fixed: km, km/h, veh/km, veh/h. Car counts n index the queue
// state 0..c where c is the section capacity.

#include <optional>
#include <utility>
#include <vector>

namespace mgcc {

/// Physical description of one road section.
class SectionParams {
 public:
  /// Capacity is derived as round(length * jam_density); throws DomainError
  /// if any value is non-positive, the product is not (numerically) an
  /// integer, or it rounds to zero.
  SectionParams(double length_km, double free_speed_kmh, double jam_density_veh_per_km);

  double length() const noexcept { return length_; }
  double free_speed() const noexcept { return free_speed_; }
  double jam_density() const noexcept { return jam_density_; }
  int capacity() const noexcept { return capacity_; }
  double critical_density() const noexcept { return jam_density_ / 2.0; }

 private:
  double length_;
  double free_speed_;
  double jam_density_;
  int capacity_;
};

struct ExponentialLaw {
  double beta;
  double gamma;
};

enum class SpeedModel { LinearQuadratic, Exponential };

/// Density -> speed / flow / demand / supply maps for one section.
///
/// LinearQuadratic: linear speed-density law, equivalently the parabolic
/// flow-density law q_n = q_max (1 - ((c - 2n + 1)/(c + 1))^2). q_max comes
/// from the free speed unless overridden; an override rescales every flow.
///
/// Exponential: v_n = v1 exp(-((n-1)/beta)^gamma), q_n = v_n n / L. Used for
/// single-section speed-form analysis; tandem solving requires LinearQuadratic.
class FundamentalDiagram {
 public:
  static FundamentalDiagram linear(const SectionParams& params,
                                   std::optional<double> q_max_override = std::nullopt);
  static FundamentalDiagram exponential(const SectionParams& params, ExponentialLaw law);

  const SectionParams& params() const noexcept { return params_; }
  int capacity() const noexcept { return params_.capacity(); }
  SpeedModel model() const noexcept { return model_; }
  double q_max() const noexcept { return q_max_; }
  bool q_max_overridden() const noexcept { return overridden_; }
  const std::optional<ExponentialLaw>& exponential_law() const noexcept { return law_; }

  /// Flow at car count n, any model. flows()[0] == 0.
  double flow(int n) const;
  const std::vector<double>& flows() const noexcept { return flows_; }

  /// v_n / v_1 for n = 1..c, stored at index n-1.
  std::vector<double> speed_profile() const;

 private:
  FundamentalDiagram(SectionParams params, SpeedModel model, double q_max, bool overridden,
                     std::optional<ExponentialLaw> law, std::vector<double> flows);

  SectionParams params_;
  SpeedModel model_;
  double q_max_;
  bool overridden_;
  std::optional<ExponentialLaw> law_;
  std::vector<double> flows_;
};

/// q_max = v1/(L c) ((c+1)/2)^2, the vertex of the parabolic flow law.
double q_max_from_free_speed(const SectionParams& p);

/// v1 (c - n + 1)/c for 1 <= n <= c.
double linear_speed(int n, const SectionParams& p);

/// v1 exp(-((n-1)/beta)^gamma) for n >= 1.
double exponential_speed(int n, double v1, double beta, double gamma);

/// Recovers (beta, gamma) of the exponential law from two observed speeds
/// va at count a and vb at count b, with 1 < a < b and 0 < vb < va < v1.
ExponentialLaw fit_beta_gamma(double v1, int a, double va, int b, double vb);

/// Parabolic flow q_n, 0 <= n <= c. Requires a LinearQuadratic diagram.
double quadratic_flow(int n, const FundamentalDiagram& d);

/// Traffic demand: q_n up to the critical count (c+1)/2, q_max beyond.
double demand(int n, const FundamentalDiagram& d);

/// Traffic supply: q_max up to the critical count (c+1)/2, q_n beyond.
double supply(int n, const FundamentalDiagram& d);

/// g(i) = (q_i/q_max)/i for 1 <= i <= c.
double normalized_service_rate(int i, const FundamentalDiagram& d);

/// True when n lies on the free-flow branch, n <= (c+1)/2 compared exactly.
inline bool on_free_branch(int n, int c) noexcept { return 2 * n <= c + 1; }

}  // namespace mgcc
