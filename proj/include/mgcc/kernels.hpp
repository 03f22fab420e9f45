#pragma once

// Data-parallel arithmetic kernels used by the stationary solvers.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, a vectorized variant (AVX2+FMA on x86-64, NEON on aarch64).
// The variant is picked once at startup from the CPU feature set and can be
// overridden with MGCC_KERNELS=scalar|avx2|neon or set_backend().
//
// Vector variants reorder floating-point reductions, so results agree with the
// scalar reference to a few ulps of the accumulated magnitude, not bitwise.

#include <span>
#include <string_view>
#include <vector>

namespace mgcc::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view backend_name(Backend b);

/// Backends compiled in and supported by the running CPU. Scalar is always first.
std::vector<Backend> available_backends();

Backend active_backend();

/// Throws std::invalid_argument if the backend is not available.
void set_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> x);
double max(std::span<const double> x);
/// Σ i·x[i]
double index_weighted_sum(std::span<const double> x);
/// Σ |a[i] - b[i]|
double abs_diff_sum(std::span<const double> a, std::span<const double> b);
/// y += alpha·x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y *= alpha
void scale(double alpha, std::span<double> y);

/// Function table for one backend. Exposed so tests can call two backends
/// side by side without touching the global selection.
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*max)(const double*, std::size_t);
  double (*index_weighted_sum)(const double*, std::size_t);
  double (*abs_diff_sum)(const double*, const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
};

const KernelTable& table(Backend b);

}  // namespace mgcc::kernels
