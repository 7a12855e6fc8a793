#pragma once
// Dense grid kernels used by the scalar field scans and the trajectory
// comparisons. Each kernel has a portable reference version and an AVX2
// version; the dispatching entry points pick one at runtime.

#include <cstddef>
#include <span>

namespace bpsim::kernels {

enum class Isa { scalar, avx2 };

bool avx2_available();
Isa active_isa();
const char* isa_name(Isa isa);

// Force a particular variant (used by tests and benchmarks). Requesting
// avx2 on a machine without it falls back to scalar.
void force_isa(Isa isa);
void reset_isa();

// out[i] = sum_k coeffs[k] * xs[i]^k, evaluated with fused Horner steps.
void polyval(std::span<const double> coeffs, std::span<const double> xs,
             std::span<double> out);

// max_i |a[i] - b[i]|; 0 for empty input.
double max_abs_diff(std::span<const double> a, std::span<const double> b);

// Number of i with v[i], v[i+1] strictly of opposite sign.
std::size_t sign_changes(std::span<const double> v);

namespace scalar {
void polyval(std::span<const double> coeffs, std::span<const double> xs,
             std::span<double> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
std::size_t sign_changes(std::span<const double> v);
}  // namespace scalar

namespace avx2 {
void polyval(std::span<const double> coeffs, std::span<const double> xs,
             std::span<double> out);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
std::size_t sign_changes(std::span<const double> v);
}  // namespace avx2

}  // namespace bpsim::kernels
