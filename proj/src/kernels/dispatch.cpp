#include "qheng/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"

namespace qheng::kernels {
namespace {

constexpr Table kScalarTable{
    &scalar::boltzmann_weights, &scalar::dot, &scalar::sum, &scalar::entropy_sum, &scalar::scale,
};

#if defined(QHENG_HAVE_AVX2)
constexpr Table kAvx2Table{
    &avx2::boltzmann_weights, &avx2::dot, &avx2::sum, &avx2::entropy_sum, &avx2::scale,
};
#endif

bool cpu_has_avx2() {
#if defined(QHENG_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend initial_backend() {
  if (const char* env = std::getenv("QHENG_KERNELS")) {
    const std::string_view requested{env};
    if (requested == "scalar") return Backend::Scalar;
    if (requested == "avx2" && cpu_has_avx2()) return Backend::Avx2;
  }
  return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> backend{initial_backend()};
  return backend;
}

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return true;
    case Backend::Avx2: return cpu_has_avx2();
  }
  return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(to_string(backend)));
  }
  current().store(backend, std::memory_order_relaxed);
}

const Table& table(Backend backend) {
  if (!backend_available(backend)) {
    throw std::invalid_argument("kernel backend not available: " + std::string(to_string(backend)));
  }
#if defined(QHENG_HAVE_AVX2)
  if (backend == Backend::Avx2) return kAvx2Table;
#endif
  return kScalarTable;
}

namespace {
const Table& active() {
#if defined(QHENG_HAVE_AVX2)
  if (active_backend() == Backend::Avx2) return kAvx2Table;
#endif
  return kScalarTable;
}
}  // namespace

double boltzmann_weights(std::span<const double> levels, double beta, std::span<double> out) {
  assert(out.size() >= levels.size());
  return active().boltzmann_weights(levels.data(), levels.size(), beta, out.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum(std::span<const double> values) { return active().sum(values.data(), values.size()); }

double entropy_sum(std::span<const double> probs) {
  return active().entropy_sum(probs.data(), probs.size());
}

void scale(std::span<const double> values, double factor, std::span<double> out) {
  assert(out.size() >= values.size());
  active().scale(values.data(), values.size(), factor, out.data());
}

}  // namespace qheng::kernels
