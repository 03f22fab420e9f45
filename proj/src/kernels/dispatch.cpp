#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tables.hpp"

namespace mgcc::kernels {
namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(MGCC_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(MGCC_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend pick_default() {
  if (const char* env = std::getenv("MGCC_KERNELS")) {
    const std::string want{env};
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (want == backend_name(b) && cpu_supports(b)) return b;
    }
  }
  if (cpu_supports(Backend::Avx2)) return Backend::Avx2;
  if (cpu_supports(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

std::atomic<const KernelTable*>& active_table() {
  static std::atomic<const KernelTable*> t{&table(pick_default())};
  return t;
}

std::atomic<Backend>& active_id() {
  static std::atomic<Backend> id{pick_default()};
  return id;
}

const KernelTable& current() { return *active_table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
  }
  return "unknown";
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

const KernelTable& table(Backend b) {
  if (!cpu_supports(b)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(backend_name(b)));
  }
  switch (b) {
#if defined(MGCC_HAVE_AVX2)
    case Backend::Avx2: return detail::avx2_table;
#endif
#if defined(MGCC_HAVE_NEON)
    case Backend::Neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

Backend active_backend() { return active_id().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  const KernelTable& t = table(b);
  active_table().store(&t, std::memory_order_relaxed);
  active_id().store(b, std::memory_order_relaxed);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return current().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> x) { return current().sum(x.data(), x.size()); }

double max(std::span<const double> x) { return current().max(x.data(), x.size()); }

double index_weighted_sum(std::span<const double> x) {
  return current().index_weighted_sum(x.data(), x.size());
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("abs_diff_sum: length mismatch");
  return current().abs_diff_sum(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: length mismatch");
  current().axpy(alpha, x.data(), y.data(), y.size());
}

void scale(double alpha, std::span<double> y) { current().scale(alpha, y.data(), y.size()); }

}  // namespace mgcc::kernels
