#include "mgcc/distribution.hpp"

#include <cmath>

#include "mgcc/errors.hpp"
#include "mgcc/kernels.hpp"

namespace mgcc {

std::string to_string(DistributionSource s) {
  switch (s) {
    case DistributionSource::SpeedForm: return "SpeedForm";
    case DistributionSource::FlowForm: return "FlowForm";
    case DistributionSource::CtmcOracle: return "CtmcOracle";
    case DistributionSource::TandemMarginal: return "TandemMarginal";
    case DistributionSource::TandemConditional: return "TandemConditional";
    case DistributionSource::TandemJoint: return "TandemJoint";
  }
  return "Unknown";
}

StationaryDistribution::StationaryDistribution(std::vector<double> probs, DistributionSource source,
                                               std::optional<int> conditioned_on)
    : probs_(std::move(probs)), source_(source), conditioned_on_(conditioned_on) {
  if (probs_.empty()) throw ContractError("distribution must have at least one state");
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw ContractError("distribution entries must be finite and >= 0");
    }
  }
  const double total = kernels::sum(probs_);
  if (std::fabs(total - 1.0) > kNormalizationTolerance) {
    throw ContractError("distribution does not sum to 1 (sum - 1 = " +
                        std::to_string(total - 1.0) + ")");
  }
}

StationaryDistribution StationaryDistribution::empty_system(int capacity, DistributionSource source) {
  if (capacity < 0) throw ContractError("capacity must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(capacity) + 1, 0.0);
  p[0] = 1.0;
  return StationaryDistribution(std::move(p), source);
}

StationaryDistribution StationaryDistribution::from_log_weights(std::span<const double> log_weights,
                                                                DistributionSource source,
                                                                std::optional<int> conditioned_on) {
  std::vector<double> w(log_weights.begin(), log_weights.end());
  const double top = kernels::max(w);
  for (double& x : w) x = std::exp(x - top);
  // One correction pass: the first rescale leaves the sum within a few ulps
  // of 1, the second removes what is left of that for long vectors.
  kernels::scale(1.0 / kernels::sum(w), w);
  kernels::scale(1.0 / kernels::sum(w), w);
  return StationaryDistribution(std::move(w), source, conditioned_on);
}

double StationaryDistribution::mean() const { return kernels::index_weighted_sum(probs_); }

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<double> Matrix::row_sums() const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = kernels::sum(row(r));
  return out;
}

std::vector<double> Matrix::column_sums() const {
  std::vector<double> out(cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) kernels::axpy(1.0, row(r), out);
  return out;
}

double Matrix::total() const { return kernels::sum(data_); }

}  // namespace mgcc
