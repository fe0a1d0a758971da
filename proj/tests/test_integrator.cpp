#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "cepspin/integrator.hpp"

using namespace cepspin;
using Catch::Matchers::WithinAbs;
using Vec2 = Eigen::Vector2cd;

namespace {

// Constant coupling: y' = (i w y2, i w y1); from (0, 1) the solution is
// (i sin(w t), cos(w t)).
auto flop_rhs(double w) {
  return [w](double /*t*/, const Vec2& y) {
    Vec2 d;
    d(0) = std::complex<double>(0, 1) * w * y(1);
    d(1) = std::complex<double>(0, 1) * w * y(0);
    return d;
  };
}

Vec2 flop_exact(double w, double t) {
  return Vec2(std::complex<double>(0.0, std::sin(w * t)),
              std::complex<double>(std::cos(w * t), 0.0));
}

}  // namespace

TEST_CASE("fixed-step rk4 shows 4th-order convergence", "[integrator]") {
  const double w = 1.0, t1 = 1.7;
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  std::vector<double> errs;
  for (std::size_t n : {40, 80, 160, 320}) {
    const Vec2 y = integrate_rk4(flop_rhs(w), 0.0, t1, y0, n);
    errs.push_back((y - flop_exact(w, t1)).norm());
  }
  double slope_sum = 0.0;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i)
    slope_sum += std::log2(errs[i] / errs[i + 1]);
  const double mean_slope = slope_sum / static_cast<double>(errs.size() - 1);
  CHECK(mean_slope > 3.7);
  CHECK(mean_slope < 4.3);
}

TEST_CASE("dopri5 hits analytic solution within tolerance", "[integrator]") {
  const double w = 3.0, t1 = 5.0;
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  auto res = integrate_dopri5(flop_rhs(w), 0.0, t1, y0, {}, 1e-11, 1e-13, 0.5);
  CHECK((res.final_state - flop_exact(w, t1)).norm() < 1e-8);
  CHECK(res.stats.accepted > 10);
}

TEST_CASE("dopri5 dense output tracks the solution between steps", "[integrator]") {
  const double w = 2.0, t1 = 4.0;
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  std::vector<double> ts;
  for (int i = 0; i <= 40; ++i) ts.push_back(t1 * i / 40.0);
  auto res = integrate_dopri5(flop_rhs(w), 0.0, t1, y0, ts, 1e-10, 1e-12, 1.0);
  REQUIRE(res.samples.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK((res.samples[i] - flop_exact(w, ts[i])).norm() < 1e-7);
}

TEST_CASE("dopri5 integrates backward", "[integrator]") {
  const double w = 2.0;
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  auto fwd = integrate_dopri5(flop_rhs(w), 0.0, 3.0, y0, {}, 1e-11, 1e-13, 0.5);
  auto back = integrate_dopri5(flop_rhs(w), 3.0, 0.0, fwd.final_state, {}, 1e-11, 1e-13, 0.5);
  CHECK((back.final_state - y0).norm() < 1e-8);
}

TEST_CASE("dopri5 respects the step cap", "[integrator]") {
  const double cap = 0.01;
  auto rhs = [](double, const Vec2& y) { return Vec2(0.0 * y(0), 0.0 * y(1)); };
  const Vec2 y0(std::complex<double>(1, 0), std::complex<double>(0, 0));
  auto res = integrate_dopri5(rhs, 0.0, 1.0, y0, {}, 1e-10, 1e-12, cap);
  CHECK(res.stats.accepted >= static_cast<std::size_t>(1.0 / cap));
}

TEST_CASE("dopri5 raises on impossible step budgets", "[integrator]") {
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  CHECK_THROWS_AS(
      integrate_dopri5(flop_rhs(5.0), 0.0, 10.0, y0, {}, 1e-10, 1e-12, 1.0, 50),
      IntegrationError);
}

TEST_CASE("fixed-step sampled driver hits sample times exactly", "[integrator]") {
  const double w = 1.3;
  const Vec2 y0(std::complex<double>(0, 0), std::complex<double>(1, 0));
  std::vector<double> ts = {0.0, 0.37, 1.0, 2.0};
  auto res = integrate_rk4_sampled(flop_rhs(w), 0.0, 2.0, y0, ts, 1e-3);
  REQUIRE(res.samples.size() == 4);
  for (std::size_t i = 0; i < ts.size(); ++i)
    CHECK((res.samples[i] - flop_exact(w, ts[i])).norm() < 1e-9);
}

TEST_CASE("integrator config validation", "[integrator]") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.rel_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = IntegratorConfig{};
  c.samples = 1;
  CHECK_THROWS_AS(c.validate(), std::domain_error);
  c = IntegratorConfig{};
  c.mode = StepMode::fixed;
  CHECK_THROWS_AS(c.validate(), std::domain_error);  // fixed_step unset
  c.fixed_step = 1e-7;
  CHECK_NOTHROW(c.validate());
}
