#include "floquet/transition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "floquet/error.hpp"
#include "floquet/linalg.hpp"
#include "floquet/log.hpp"
#include "floquet/quadrature.hpp"

namespace floquet {

ode::Options ode_options(const SystemSpec& system, double span) {
  ode::Options opt;
  opt.abs_tol = system.tol.ode_abs;
  opt.rel_tol = system.tol.ode_rel;
  // keep several steps per interval so the interpolant resolves the coefficients
  if (span > 0.0) opt.max_step = span / 8.0;
  return opt;
}

namespace {

double min_interval_length(const SystemSpec& system) {
  double len = system.omega;
  for (int k = 0; k < system.p(); ++k) len = std::min(len, system.grid.time(k + 1) - system.grid.time(k));
  return len;
}

}  // namespace

CMatrix fundamental_matrix(const SystemSpec& system, double s, double t) {
  const int n = system.n;
  if (s == t) return CMatrix::Identity(n, n);
  RMatrix a(n, n);
  auto rhs = [&](double u, const RMatrix& z, RMatrix& dz) {
    system.A.eval_into(u, a);
    dz.noalias() = a * z;
  };
  ode::DormandPrince45<RMatrix> solver(ode_options(system, min_interval_length(system)));
  return solver.integrate(rhs, s, RMatrix::Identity(n, n), t).final().cast<Complex>();
}

CMatrix j_matrix(const SystemSpec& system, double tau, double t) {
  const int n = system.n;
  if (tau == t) return CMatrix::Identity(n, n);
  RMatrix a(n, n), b(n, n);
  auto rhs = [&](double u, const RMatrix& y, RMatrix& dy) {
    system.A.eval_into(u, a);
    system.B.eval_into(u, b);
    dy.resize(n, 2 * n);
    const auto psi = y.leftCols(n);
    dy.leftCols(n).noalias() = -psi * a;
    dy.rightCols(n).noalias() = psi * b;
  };
  RMatrix y0 = RMatrix::Zero(n, 2 * n);
  y0.leftCols(n).setIdentity();
  ode::DormandPrince45<RMatrix> solver(ode_options(system, min_interval_length(system)));
  const RMatrix y = solver.integrate(rhs, tau, y0, t).final();
  return (RMatrix::Identity(n, n) + y.rightCols(n)).cast<Complex>();
}

CMatrix e_matrix(const SystemSpec& system, double tau, double t) {
  return fundamental_matrix(system, tau, t) * j_matrix(system, tau, t);
}

IntervalOperators::IntervalOperators(const SystemSpec& system, long k)
    : n_(system.n),
      k_(k),
      t_left_(system.grid.time(k)),
      t_right_(system.grid.time(k + 1)),
      zeta_(system.grid.arg(k)) {
  const int n = n_;
  RMatrix a(n, n), b(n, n);
  auto rhs = [&](double u, const RMatrix& y, RMatrix& dy) {
    system.A.eval_into(u, a);
    system.B.eval_into(u, b);
    dy.resize(n, 3 * n);
    const auto psi = y.middleCols(n, n);
    dy.leftCols(n).noalias() = a * y.leftCols(n);
    dy.middleCols(n, n).noalias() = -psi * a;
    dy.rightCols(n).noalias() = psi * b;
  };
  RMatrix y0 = RMatrix::Zero(n, 3 * n);
  y0.leftCols(n).setIdentity();
  y0.middleCols(n, n).setIdentity();

  const ode::DormandPrince45<RMatrix> solver(ode_options(system, t_right_ - t_left_));
  forward_ = solver.integrate(rhs, zeta_, y0, t_right_);
  backward_ = solver.integrate(rhs, zeta_, y0, t_left_);

  e_left_ = e(t_left_);
  e_right_ = e(t_right_);
  const RMatrix j_left = j(t_left_);
  const RMatrix j_right = j(t_right_);
  det_j_left_ = j_left.determinant();
  det_j_right_ = j_right.determinant();

  const double scale = std::max(1.0, std::pow(linalg::norm1(j_left), n));
  if (!(std::abs(det_j_left_) > 1e-12 * scale))
    throw SingularMatrixError("interval " + std::to_string(k) + ": J(t_k, zeta_k) is singular (det = " +
                              std::to_string(det_j_left_) + ")");
  if (!(std::abs(det_j_right_) > system.tol.alg))
    log_message(LogLevel::Debug, "interval " + std::to_string(k) + ": det J(t_{k+1}, zeta_k) = " +
                                     std::to_string(det_j_right_));
  Eigen::PartialPivLU<RMatrix> lu(e_left_);
  e_left_inv_ = lu.inverse();
}

RMatrix IntervalOperators::state(double u) const {
  const double slack = 1e-9 * std::max(1.0, std::abs(u));
  if (u < t_left_ - slack || u > t_right_ + slack)
    throw InputError("time " + std::to_string(u) + " is outside interval " + std::to_string(k_));
  return u >= zeta_ ? forward_(u) : backward_(u);
}

RMatrix IntervalOperators::phi(double u) const { return state(u).leftCols(n_); }

RMatrix IntervalOperators::j(double u) const {
  return RMatrix::Identity(n_, n_) + state(u).rightCols(n_);
}

RMatrix IntervalOperators::e(double u) const {
  const RMatrix y = state(u);
  return y.leftCols(n_) * (RMatrix::Identity(n_, n_) + y.rightCols(n_));
}

RMatrix IntervalOperators::w(double s, double t) const {
  if (s == t_left_) return e(t) * e_left_inv_;
  const RMatrix es = e(s);
  return e(t) * linalg::inv<double>(es.cast<Complex>()).real();
}

CMatrix w_local(const SystemSpec& system, long k, double s, double t) {
  IntervalOperators ops(system, k);
  return ops.w(s, t).cast<Complex>();
}

const IntervalOperators& TransitionCache::interval(long k) {
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = intervals_[k];
  if (!slot) slot = std::make_unique<IntervalOperators>(system_, k);
  return *slot;
}

HypothesisReport hypothesis_check(const SystemSpec& system) {
  HypothesisReport report;
  const ArgumentGrid& grid = system.grid;
  RMatrix buf(system.n, system.n);
  auto norm_a = [&](double u) {
    system.A.eval_into(u, buf);
    return linalg::norm1(buf);
  };
  auto norm_b = [&](double u) {
    system.B.eval_into(u, buf);
    return linalg::norm1(buf);
  };
  for (int k = 0; k < system.p(); ++k) {
    const double tk = grid.time(k), zk = grid.arg(k), tk1 = grid.time(k + 1);
    HypothesisInterval iv;
    iv.sigma_plus = std::exp(integrate_adaptive(norm_a, tk, zk));
    iv.sigma_minus = std::exp(integrate_adaptive(norm_a, zk, tk1));
    iv.nu_plus = iv.sigma_plus * integrate_adaptive(norm_b, tk, zk);
    iv.nu_minus = iv.sigma_minus * integrate_adaptive(norm_b, zk, tk1);
    report.sigma = std::max({report.sigma, iv.sigma_plus, iv.sigma_minus});
    report.nu_plus = std::max(report.nu_plus, iv.nu_plus);
    report.nu_minus = std::max(report.nu_minus, iv.nu_minus);
    report.intervals.push_back(iv);
  }
  report.pass = report.nu_plus < 1.0 && report.nu_minus < 1.0;
  const double inf = std::numeric_limits<double>::infinity();
  report.bound_inv_plus = report.nu_plus < 1.0 ? 1.0 / (1.0 - report.nu_plus) : inf;
  report.bound_minus = 1.0 + report.nu_minus;
  report.bound_inv_minus = report.nu_minus < 1.0 ? 1.0 / (1.0 - report.nu_minus) : inf;
  report.bound_plus = 1.0 + report.nu_plus;
  if (!report.pass)
    log_message(LogLevel::Warn, "hypothesis (H) fails: nu+ = " + std::to_string(report.nu_plus) +
                                    ", nu- = " + std::to_string(report.nu_minus));
  return report;
}

}  // namespace floquet
