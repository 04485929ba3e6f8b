#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "floquet/model.hpp"
#include "floquet/ode.hpp"
#include "floquet/types.hpp"

namespace floquet {

/// Phi(t, s): solution of Z' = A(u) Z with Z(s) = I.
CMatrix fundamental_matrix(const SystemSpec& system, double s, double t);

/// J(t, tau) = I + int_tau^t Phi(tau, s) B(s) ds, via Psi' = -Psi A, K' = Psi B.
CMatrix j_matrix(const SystemSpec& system, double tau, double t);

/// E(t, tau) = Phi(t, tau) J(t, tau).
CMatrix e_matrix(const SystemSpec& system, double tau, double t);

/// Operators of one global interval [t_k, t_{k+1}] anchored at zeta_k.
/// The stacked state [Phi | Psi | K] is integrated from zeta_k to both ends
/// with dense output, so any u in the closed interval is available.
class IntervalOperators {
 public:
  IntervalOperators(const SystemSpec& system, long k);

  long index() const noexcept { return k_; }
  double t_left() const noexcept { return t_left_; }
  double t_right() const noexcept { return t_right_; }
  double zeta() const noexcept { return zeta_; }

  /// Phi(u, zeta_k).
  RMatrix phi(double u) const;
  /// J(u, zeta_k).
  RMatrix j(double u) const;
  /// E(u, zeta_k).
  RMatrix e(double u) const;
  /// E(t, zeta_k) E(s, zeta_k)^{-1} for s, t in the closed interval.
  RMatrix w(double s, double t) const;

  const RMatrix& e_left() const noexcept { return e_left_; }
  const RMatrix& e_right() const noexcept { return e_right_; }
  const RMatrix& e_left_inv() const noexcept { return e_left_inv_; }
  double det_j_left() const noexcept { return det_j_left_; }
  double det_j_right() const noexcept { return det_j_right_; }

 private:
  RMatrix state(double u) const;

  int n_;
  long k_;
  double t_left_, t_right_, zeta_;
  ode::DenseSolution<RMatrix> forward_;
  ode::DenseSolution<RMatrix> backward_;
  RMatrix e_left_, e_right_, e_left_inv_;
  double det_j_left_ = 1.0, det_j_right_ = 1.0;
};

/// W(t, s) = E(t, zeta_k) E(s, zeta_k)^{-1} for s, t in the closure of interval k.
CMatrix w_local(const SystemSpec& system, long k, double s, double t);

/// Lazily built, thread-safe map from global interval index to its operators.
/// The referenced system must outlive the cache.
class TransitionCache {
 public:
  explicit TransitionCache(const SystemSpec& system) : system_(system) {}

  const SystemSpec& system() const noexcept { return system_; }
  const IntervalOperators& interval(long k);

 private:
  const SystemSpec& system_;
  std::mutex mutex_;
  std::map<long, std::unique_ptr<IntervalOperators>> intervals_;
};

struct HypothesisInterval {
  double sigma_plus;   // exp(int_{t_k}^{zeta_k} |A|)
  double sigma_minus;  // exp(int_{zeta_k}^{t_{k+1}} |A|)
  double nu_plus;
  double nu_minus;
};

struct HypothesisReport {
  std::vector<HypothesisInterval> intervals;
  double sigma = 1.0;
  double nu_plus = 0.0;
  double nu_minus = 0.0;
  bool pass = true;
  /// 1/(1-nu+), 1+nu-, 1/(1-nu-), 1+nu+ (infinite when nu >= 1).
  double bound_inv_plus = 1.0;
  double bound_minus = 1.0;
  double bound_inv_minus = 1.0;
  double bound_plus = 1.0;
};

/// Integral smallness conditions on one period, with the matrix 1-norm.
HypothesisReport hypothesis_check(const SystemSpec& system);

ode::Options ode_options(const SystemSpec& system, double span);

}  // namespace floquet
