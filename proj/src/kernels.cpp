#include "bpsim/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace bpsim::kernels {

namespace {
// -1 means "not forced".
std::atomic<int> g_forced{-1};
}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  int f = g_forced.load(std::memory_order_relaxed);
  if (f >= 0) {
    Isa want = static_cast<Isa>(f);
    if (want == Isa::avx2 && !avx2_available()) return Isa::scalar;
    return want;
  }
  return avx2_available() ? Isa::avx2 : Isa::scalar;
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void force_isa(Isa isa) { g_forced.store(static_cast<int>(isa), std::memory_order_relaxed); }
void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

void polyval(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
  if (out.size() < xs.size()) throw std::invalid_argument("polyval: output too small");
  if (active_isa() == Isa::avx2) return avx2::polyval(coeffs, xs, out);
  scalar::polyval(coeffs, xs, out);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: length mismatch");
  if (active_isa() == Isa::avx2) return avx2::max_abs_diff(a, b);
  return scalar::max_abs_diff(a, b);
}

std::size_t sign_changes(std::span<const double> v) {
  if (active_isa() == Isa::avx2) return avx2::sign_changes(v);
  return scalar::sign_changes(v);
}

namespace scalar {

void polyval(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
  const std::size_t n = xs.size();
  if (coeffs.empty()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  const std::size_t deg = coeffs.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = coeffs[deg];
    for (std::size_t k = deg; k-- > 0;) acc = std::fma(acc, xs[i], coeffs[k]);
    out[i] = acc;
  }
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (d > m || std::isnan(d)) m = d;
  }
  return m;
}

std::size_t sign_changes(std::span<const double> v) {
  std::size_t c = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if ((v[i] < 0.0 && v[i + 1] > 0.0) || (v[i] > 0.0 && v[i + 1] < 0.0)) ++c;
  }
  return c;
}

}  // namespace scalar

}  // namespace bpsim::kernels
