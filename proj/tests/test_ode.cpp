#include <cmath>
#include <complex>

#include <doctest.h>

#include "floquet/ode.hpp"
#include "floquet/quadrature.hpp"

using floquet::ode::DormandPrince45;
using Vec = Eigen::VectorXd;

TEST_CASE("exponential decay matches closed form") {
  DormandPrince45<Vec> solver;
  Vec y0(1);
  y0 << 1.0;
  auto sol = solver.integrate([](double, const Vec& y, Vec& dy) { dy = -y; }, 0.0, y0, 5.0);
  CHECK(std::abs(sol.final()(0) - std::exp(-5.0)) < 1e-10);
  for (double t : {0.1, 0.77, 2.5, 4.99}) CHECK(std::abs(sol(t)(0) - std::exp(-t)) < 1e-9);
}

TEST_CASE("backward integration") {
  DormandPrince45<Vec> solver;
  Vec y0(1);
  y0 << 1.0;
  auto sol = solver.integrate([](double, const Vec& y, Vec& dy) { dy = y; }, 0.0, y0, -2.0);
  CHECK(std::abs(sol.final()(0) - std::exp(-2.0)) < 1e-10);
  CHECK(std::abs(sol(-1.3)(0) - std::exp(-1.3)) < 1e-10);
}

TEST_CASE("harmonic oscillator with matrix state") {
  DormandPrince45<Eigen::MatrixXd> solver;
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, -1, 0;
  auto sol = solver.integrate([&](double, const Eigen::MatrixXd& y, Eigen::MatrixXd& dy) { dy = a * y; }, 0.0,
                              Eigen::MatrixXd::Identity(2, 2), 2.0 * M_PI);
  CHECK((sol.final() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd mid = sol(1.0);
  CHECK(std::abs(mid(0, 0) - std::cos(1.0)) < 1e-9);
  CHECK(std::abs(mid(0, 1) - std::sin(1.0)) < 1e-9);
}

TEST_CASE("complex state") {
  using CVec = Eigen::VectorXcd;
  DormandPrince45<CVec> solver;
  CVec y0(1);
  y0 << std::complex<double>(1.0, 0.0);
  const std::complex<double> i(0.0, 1.0);
  auto sol = solver.integrate([&](double, const CVec& y, CVec& dy) { dy = i * y; }, 0.0, y0, M_PI);
  CHECK(std::abs(sol.final()(0) + 1.0) < 1e-9);
}

TEST_CASE("dense output is continuous across segments") {
  DormandPrince45<Vec> solver;
  Vec y0(1);
  y0 << 0.0;
  auto sol = solver.integrate([](double t, const Vec&, Vec& dy) {
    dy.resize(1);
    dy(0) = std::cos(t);
  }, 0.0, y0, 10.0);
  REQUIRE(sol.segments().size() > 2);
  for (const auto& s : sol.segments()) CHECK(std::abs(sol(s.t1)(0) - std::sin(s.t1)) < 1e-9);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 10.0 * i / 1000.0;
    worst = std::max(worst, std::abs(sol(t)(0) - std::sin(t)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("zero-length span returns the initial state") {
  DormandPrince45<Vec> solver;
  Vec y0(2);
  y0 << 1.0, 2.0;
  auto sol = solver.integrate([](double, const Vec& y, Vec& dy) { dy = y; }, 3.0, y0, 3.0);
  CHECK(sol.final() == y0);
  CHECK(sol(3.0) == y0);
}

TEST_CASE("step underflow on a finite-time blowup") {
  floquet::ode::Options opt;
  DormandPrince45<Vec> solver(opt);
  Vec y0(1);
  y0 << 1.0;
  CHECK_THROWS_AS(solver.integrate([](double, const Vec& y, Vec& dy) { dy = y.array().square(); }, 0.0, y0, 2.0),
                  floquet::NumericalError);
}

TEST_CASE("Gauss-Kronrod quadrature") {
  CHECK(std::abs(floquet::integrate_adaptive([](double s) { return std::sin(2 * M_PI * s); }, 0.0, 1.0)) < 1e-12);
  CHECK(std::abs(floquet::integrate_adaptive([](double s) { return std::exp(s); }, 0.0, 1.0) - (M_E - 1.0)) < 1e-12);
  CHECK(floquet::integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0) == 0.0);
}
