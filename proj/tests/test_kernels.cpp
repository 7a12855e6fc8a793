#include <cmath>
#include <random>
#include <vector>

#include "bpsim/kernels.hpp"
#include "doctest.h"

using namespace bpsim::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& g, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

struct IsaGuard {
  ~IsaGuard() { reset_isa(); }
};

}  // namespace

TEST_CASE("polyval matches direct evaluation") {
  std::vector<double> coeffs = {1.0, -2.0, 0.5};  // 1 - 2x + 0.5x^2
  std::vector<double> xs = {0.0, 1.0, 2.0, -1.0, 0.25};
  std::vector<double> out(xs.size());
  scalar::polyval(coeffs, xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i)
    CHECK(out[i] == doctest::Approx(1.0 - 2.0 * xs[i] + 0.5 * xs[i] * xs[i]).epsilon(1e-15));
}

TEST_CASE("max_abs_diff and sign_changes reference values") {
  std::vector<double> a = {1, 2, 3}, b = {1, 2.5, 2};
  CHECK(scalar::max_abs_diff(a, b) == 1.0);
  CHECK(scalar::max_abs_diff(std::span<const double>{}, std::span<const double>{}) == 0.0);
  std::vector<double> v = {1, -1, 0, 2, -3, -4, 5};
  // (1,-1), (2,-3), (-4,5); pairs touching zero do not count
  CHECK(scalar::sign_changes(v) == 3);
}

TEST_CASE("avx2 variants agree with the scalar reference") {
  IsaGuard guard;
  if (!avx2_available()) {
    MESSAGE("avx2 not available; dispatch must fall back to scalar");
    force_isa(Isa::avx2);
    CHECK(active_isa() == Isa::scalar);
    return;
  }
  std::mt19937_64 g(7);
  for (std::size_t n = 0; n < 70; ++n) {
    auto xs = random_vec(g, n, -1.5, 1.5);
    auto ys = random_vec(g, n, -1.5, 1.5);
    for (std::size_t deg = 0; deg < 6; ++deg) {
      auto coeffs = random_vec(g, deg + 1, -2.0, 2.0);
      std::vector<double> o1(n), o2(n);
      scalar::polyval(coeffs, xs, o1);
      avx2::polyval(coeffs, xs, o2);
      for (std::size_t i = 0; i < n; ++i) CHECK(o2[i] == doctest::Approx(o1[i]).epsilon(1e-13));
    }
    CHECK(avx2::max_abs_diff(xs, ys) == scalar::max_abs_diff(xs, ys));
    // Sprinkle exact zeros so the strict sign rule is exercised.
    for (std::size_t i = 0; i < n; i += 5) xs[i] = 0.0;
    CHECK(avx2::sign_changes(xs) == scalar::sign_changes(xs));
  }
}

TEST_CASE("dispatch honours forced variants") {
  IsaGuard guard;
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  std::vector<double> a = {0.0, 3.0}, b = {1.0, 1.0};
  CHECK(max_abs_diff(a, b) == 2.0);
  reset_isa();
  CHECK(active_isa() == (avx2_available() ? Isa::avx2 : Isa::scalar));
  CHECK(max_abs_diff(a, b) == 2.0);
}
