#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <doctest.h>

#include "floquet/error.hpp"
#include "floquet/floquet.hpp"
#include "floquet/linalg.hpp"
#include "floquet/simulate.hpp"
#include "test_support.hpp"

using namespace floquet;
using floquet::testing::bundled;
using floquet::testing::scalar_system;

namespace {

CVector vec(std::initializer_list<Complex> values) {
  CVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const auto& z : values) v(i++) = z;
  return v;
}

const TrajectoryRecord& find(const Trajectory& tr, double t, RecordKind kind) {
  for (const auto& r : tr.records)
    if (std::abs(r.t - t) < 1e-12 && r.kind == kind) return r;
  FAIL("record not found");
  return tr.records.front();
}

}  // namespace

TEST_CASE("scalar trajectory") {
  const SystemSpec sys = bundled("scalar_impulse");
  const Trajectory tr = solve_cauchy(sys, vec({6.0}), 3.0, 0.5);
  CHECK(tr.method == "cauchy");
  CHECK(std::abs(find(tr, 0.5, RecordKind::Sample).x(0) - 2.1) < 1e-9);
  CHECK(std::abs(find(tr, 1.5, RecordKind::Sample).x(0) + 2.1) < 1e-9);
  CHECK(std::abs(find(tr, 1.0, RecordKind::LeftLimit).x(0) + 1.8) < 1e-9);
  CHECK(std::abs(find(tr, 1.0, RecordKind::PostImpulse).x(0) + 6.0) < 1e-9);
  CHECK(std::abs(find(tr, 3.0, RecordKind::PostImpulse).x(0) + 6.0) < 1e-9);
  for (std::size_t i = 1; i < tr.records.size(); ++i) CHECK(tr.records[i - 1].t <= tr.records[i].t);

  const Trajectory direct = solve_direct(sys, vec({6.0}), 3.0, 0.5);
  CHECK(max_discrepancy(tr, direct) < 1e-10);
}

TEST_CASE("breakpoints carry a left limit and an impulse value") {
  const SystemSpec sys = bundled("rotation_2x2");
  const Trajectory tr = solve_cauchy(sys, vec({1.0, Complex(0.0, 1.0)}), 13.0, 1.0);
  int pairs = 0;
  for (std::size_t i = 0; i + 1 < tr.records.size(); ++i) {
    const auto& a = tr.records[i];
    if (a.kind != RecordKind::LeftLimit) continue;
    const auto& b = tr.records[i + 1];
    REQUIRE(b.kind == RecordKind::PostImpulse);
    CHECK(a.t == b.t);
    const CVector expected = sys.jump(1).cast<Complex>() * a.x;
    CHECK((b.x - expected).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, a.x.cwiseAbs().maxCoeff()));
    ++pairs;
  }
  CHECK(pairs == 2);
}

TEST_CASE("zero initial data stays zero") {
  for (const char* name : {"scalar_impulse", "markus_yamabe"}) {
    const SystemSpec sys = bundled(name);
    const CVector zero = CVector::Zero(sys.n);
    for (const auto& r : solve_cauchy(sys, zero, 2.0 * sys.omega, sys.omega / 7.0).records) CHECK(r.x.norm() == 0.0);
    for (const auto& r : solve_direct(sys, zero, 2.0 * sys.omega, sys.omega / 7.0).records) CHECK(r.x.norm() == 0.0);
  }
}

TEST_CASE("sin example with unit jump is periodic") {
  const SystemSpec sys = scalar_system("0", "sin(2*pi*t)", 0.0);
  for (const Trajectory& tr : {solve_cauchy(sys, vec({1.0}), 3.0, 0.05), solve_direct(sys, vec({1.0}), 3.0, 0.05)}) {
    for (const auto& r : tr.records) {
      const double expected = 1.0 + (1.0 - std::cos(2.0 * std::numbers::pi * r.t)) / (2.0 * std::numbers::pi);
      CHECK(std::abs(r.x(0) - expected) < 1e-8);
    }
  }
}

TEST_CASE("direct and Cauchy solvers agree over five periods") {
  for (const char* name : {"scalar_impulse", "sin_impulse", "rotation_2x2", "markus_yamabe"}) {
    const SystemSpec sys = bundled(name);
    CVector x0 = CVector::Ones(sys.n);
    if (sys.n == 2) x0(1) = Complex(-0.5, 0.25);
    const double t_end = 5.0 * sys.omega, dt = sys.omega / 20.0;
    const Trajectory a = solve_cauchy(sys, x0, t_end, dt);
    const Trajectory b = solve_direct(sys, x0, t_end, dt);
    INFO(name);
    CHECK(b.method == "direct");
    CHECK(max_discrepancy(a, b) <= 1e-7);
  }
}

TEST_CASE("advanced and retarded arguments in the direct solver") {
  const SystemSpec sys = load_system(R"json({"n": 2, "omega": 2, "p": 3, "times": [0, 0.5, 1.2, 2], "args": [0.3, 0.5, 2],
    "A": [["-0.2 + 0.3*cos(pi*t)", "0.4*sin(pi*t)"], ["0.1", "-0.5 + 0.2*sin(pi*t)^2"]],
    "B": [["0.2*cos(pi*t)", "0.1"], ["-0.15", "0.25*sin(pi*t)"]],
    "impulses": [[[0.1, 0], [0, -0.2]], [[0, 0.3], [0, 0]], [[-0.5, 0], [0.2, 0.1]]]})json");
  const CVector x0 = vec({1.0, -2.0});
  CHECK(max_discrepancy(solve_cauchy(sys, x0, 9.0, 0.13), solve_direct(sys, x0, 9.0, 0.13)) <= 1e-7);
}

TEST_CASE("superposition") {
  const SystemSpec sys = bundled("rotation_2x2");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 3; ++trial) {
    const CVector x = vec({Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng))});
    const CVector y = vec({Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng))});
    const Complex alpha(normal(rng), normal(rng)), beta(normal(rng), normal(rng));
    const Trajectory tx = solve_direct(sys, x, 2.0 * sys.omega, 0.5);
    const Trajectory ty = solve_direct(sys, y, 2.0 * sys.omega, 0.5);
    const Trajectory tz = solve_direct(sys, CVector(alpha * x + beta * y), 2.0 * sys.omega, 0.5);
    for (std::size_t i = 0; i < tz.records.size(); ++i) {
      const CVector combo = alpha * tx.records[i].x + beta * ty.records[i].x;
      CHECK((tz.records[i].x - combo).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, combo.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("eigenvector data grows by the multiplier each period") {
  const SystemSpec sys = bundled("rotation_2x2");
  const auto spectrum = linalg::eig(monodromy(sys));
  REQUIRE(spectrum.eigenvectors);
  const double dt = sys.omega / 8.0;
  for (int j = 0; j < 2; ++j) {
    const Trajectory tr = solve_cauchy(sys, spectrum.eigenvectors->col(j), 2.0 * sys.omega, dt);
    int checked = 0;
    for (const auto& r : tr.records) {
      if (r.kind == RecordKind::LeftLimit || r.t > sys.omega * (1.0 + 1e-12)) continue;
      for (const auto& later : tr.records) {
        if (later.kind == RecordKind::LeftLimit || std::abs(later.t - r.t - sys.omega) > 1e-9) continue;
        const double ratio = later.x.norm() / r.x.norm();
        CHECK(std::abs(ratio - std::abs(spectrum.eigenvalues[j])) <= 1e-5 * std::abs(spectrum.eigenvalues[j]));
        ++checked;
      }
    }
    CHECK(checked == 9);
  }
}

TEST_CASE("CSV layout") {
  const Trajectory tr = solve_cauchy(bundled("markus_yamabe"), vec({1.0, 0.0}), 1.0, 0.5);
  std::istringstream csv(trajectory_csv(tr));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,kind,re_x1,im_x1,re_x2,im_x2");
  std::getline(csv, line);
  CHECK(line.rfind("0.000000000000e+00,sample,1.000000000000e+00,0.000000000000e+00,", 0) == 0);
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 2);
}

TEST_CASE("bad requests") {
  const SystemSpec sys = bundled("markus_yamabe");
  CHECK_THROWS_AS(solve_cauchy(sys, vec({1.0}), 1.0, 0.1), InputError);
  CHECK_THROWS_AS(solve_cauchy(sys, vec({1.0, 0.0}), -1.0, 0.1), InputError);
  CHECK_THROWS_AS(solve_direct(sys, vec({1.0, 0.0}), 1.0, 0.0), InputError);
  const SystemSpec singular = scalar_system("0", "1", 0.0, 1.0);
  CHECK_THROWS_AS(solve_direct(singular, vec({1.0}), 1.0, 0.1), SingularMatrixError);
}
