#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mgcc {

enum class DistributionSource {
  SpeedForm,
  FlowForm,
  CtmcOracle,
  TandemMarginal,
  TandemConditional,
  TandemJoint,
};

std::string to_string(DistributionSource s);

/// Normalized probability vector over car counts 0..c.
class StationaryDistribution {
 public:
  /// Validates length c+1, non-negativity and sum == 1 within 1e-12;
  /// throws ContractError otherwise.
  StationaryDistribution(std::vector<double> probs, DistributionSource source,
                         std::optional<int> conditioned_on = std::nullopt);

  /// Exact point mass at n = 0.
  static StationaryDistribution empty_system(int capacity, DistributionSource source);

  /// Builds a distribution from unnormalized log weights: exponentiates after
  /// subtracting the maximum, then rescales to unit mass.
  static StationaryDistribution from_log_weights(std::span<const double> log_weights,
                                                 DistributionSource source,
                                                 std::optional<int> conditioned_on = std::nullopt);

  int capacity() const noexcept { return static_cast<int>(probs_.size()) - 1; }
  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t n) const { return probs_[n]; }
  double blocking() const noexcept { return probs_.back(); }
  double mean() const;
  DistributionSource source() const noexcept { return source_; }
  /// n2 for TandemConditional distributions.
  std::optional<int> conditioned_on() const noexcept { return conditioned_on_; }

  static constexpr double kNormalizationTolerance = 1e-12;

 private:
  std::vector<double> probs_;
  DistributionSource source_;
  std::optional<int> conditioned_on_;
};

/// Dense row-major matrix; rows index section 1 counts, columns section 2.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
  double total() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mgcc
