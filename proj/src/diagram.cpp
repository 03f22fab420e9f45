#include "mgcc/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mgcc/errors.hpp"

namespace mgcc {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be finite and > 0");
  }
}

void require_count(int n, int lo, int hi, const char* op) {
  if (n < lo || n > hi) {
    throw DomainError(std::string(op) + ": car count " + std::to_string(n) + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

void require_quadratic(const FundamentalDiagram& d, const char* op) {
  if (d.model() != SpeedModel::LinearQuadratic) {
    throw DomainError(std::string(op) + " requires the linear/quadratic diagram");
  }
}

int derive_capacity(double length, double jam_density) {
  const double cars = length * jam_density;
  const double rounded = std::round(cars);
  if (std::fabs(cars - rounded) > 1e-9 * std::max(1.0, cars)) {
    throw DomainError("length * jam_density = " + std::to_string(cars) +
                      " is not an integer number of cars");
  }
  if (rounded < 1.0 || rounded > 1e7) {
    throw DomainError("capacity must lie in [1, 1e7], got " + std::to_string(rounded));
  }
  return static_cast<int>(rounded);
}

}  // namespace

SectionParams::SectionParams(double length_km, double free_speed_kmh, double jam_density_veh_per_km)
    : length_(length_km), free_speed_(free_speed_kmh), jam_density_(jam_density_veh_per_km) {
  require_positive(length_, "length");
  require_positive(free_speed_, "free speed");
  require_positive(jam_density_, "jam density");
  capacity_ = derive_capacity(length_, jam_density_);
}

FundamentalDiagram::FundamentalDiagram(SectionParams params, SpeedModel model, double q_max,
                                       bool overridden, std::optional<ExponentialLaw> law,
                                       std::vector<double> flows)
    : params_(params),
      model_(model),
      q_max_(q_max),
      overridden_(overridden),
      law_(law),
      flows_(std::move(flows)) {}

FundamentalDiagram FundamentalDiagram::linear(const SectionParams& params,
                                              std::optional<double> q_max_override) {
  double q_max = q_max_from_free_speed(params);
  if (q_max_override) {
    require_positive(*q_max_override, "q_max override");
    q_max = *q_max_override;
  }
  const int c = params.capacity();
  std::vector<double> flows(static_cast<std::size_t>(c) + 1);
  for (int n = 0; n <= c; ++n) {
    const double x = static_cast<double>(c - 2 * n + 1) / static_cast<double>(c + 1);
    flows[static_cast<std::size_t>(n)] = q_max * (1.0 - x * x);
  }
  return FundamentalDiagram(params, SpeedModel::LinearQuadratic, q_max,
                            q_max_override.has_value(), std::nullopt, std::move(flows));
}

FundamentalDiagram FundamentalDiagram::exponential(const SectionParams& params, ExponentialLaw law) {
  require_positive(law.beta, "beta");
  require_positive(law.gamma, "gamma");
  const int c = params.capacity();
  std::vector<double> flows(static_cast<std::size_t>(c) + 1, 0.0);
  for (int n = 1; n <= c; ++n) {
    const double v = exponential_speed(n, params.free_speed(), law.beta, law.gamma);
    flows[static_cast<std::size_t>(n)] = v * n / params.length();
  }
  const double q_max = *std::max_element(flows.begin(), flows.end());
  if (!(flows.back() > 0.0)) {
    throw DomainError("exponential law underflows to zero flow within capacity");
  }
  return FundamentalDiagram(params, SpeedModel::Exponential, q_max, false, law, std::move(flows));
}

double FundamentalDiagram::flow(int n) const {
  require_count(n, 0, capacity(), "flow");
  return flows_[static_cast<std::size_t>(n)];
}

std::vector<double> FundamentalDiagram::speed_profile() const {
  const int c = capacity();
  std::vector<double> f(static_cast<std::size_t>(c));
  for (int n = 1; n <= c; ++n) {
    f[static_cast<std::size_t>(n - 1)] =
        model_ == SpeedModel::LinearQuadratic
            ? static_cast<double>(c - n + 1) / c
            : std::exp(-std::pow((n - 1) / law_->beta, law_->gamma));
  }
  return f;
}

double q_max_from_free_speed(const SectionParams& p) {
  const double c = p.capacity();
  const double half = (c + 1.0) / 2.0;
  return p.free_speed() / (p.length() * c) * half * half;
}

double linear_speed(int n, const SectionParams& p) {
  const int c = p.capacity();
  require_count(n, 1, c, "linear_speed");
  return p.free_speed() * static_cast<double>(c - n + 1) / c;
}

double exponential_speed(int n, double v1, double beta, double gamma) {
  if (n < 1) throw DomainError("exponential_speed: n must be >= 1");
  require_positive(v1, "free speed");
  require_positive(beta, "beta");
  require_positive(gamma, "gamma");
  return v1 * std::exp(-std::pow((n - 1) / beta, gamma));
}

ExponentialLaw fit_beta_gamma(double v1, int a, double va, int b, double vb) {
  if (!(1 < a && a < b)) throw DomainError("fit_beta_gamma: need 1 < a < b");
  if (!(0.0 < vb && vb < va && va < v1)) {
    throw DomainError("fit_beta_gamma: need 0 < vb < va < v1");
  }
  // ln(va/v1) and ln(vb/v1) are both negative, so their ratio is in (0, 1).
  const double la = std::log(va / v1);
  const double lb = std::log(vb / v1);
  const double gamma = std::log(la / lb) / std::log(static_cast<double>(a - 1) / (b - 1));
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError("fit_beta_gamma: samples do not define a positive shape exponent");
  }
  const double beta = (a - 1) / std::pow(std::log(v1 / va), 1.0 / gamma);
  return {beta, gamma};
}

double quadratic_flow(int n, const FundamentalDiagram& d) {
  require_quadratic(d, "quadratic_flow");
  require_count(n, 0, d.capacity(), "quadratic_flow");
  return d.flows()[static_cast<std::size_t>(n)];
}

double demand(int n, const FundamentalDiagram& d) {
  require_quadratic(d, "demand");
  require_count(n, 0, d.capacity(), "demand");
  return on_free_branch(n, d.capacity()) ? d.flows()[static_cast<std::size_t>(n)] : d.q_max();
}

double supply(int n, const FundamentalDiagram& d) {
  require_quadratic(d, "supply");
  require_count(n, 0, d.capacity(), "supply");
  return on_free_branch(n, d.capacity()) ? d.q_max() : d.flows()[static_cast<std::size_t>(n)];
}

double normalized_service_rate(int i, const FundamentalDiagram& d) {
  require_count(i, 1, d.capacity(), "normalized_service_rate");
  return d.flows()[static_cast<std::size_t>(i)] / d.q_max() / i;
}

}  // namespace mgcc
