#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "floquet/linalg.hpp"
#include "floquet/model.hpp"
#include "floquet/transition.hpp"

namespace floquet {

/// Cauchy matrix X(t) = W(t, 0) for t >= 0, built from the per-interval
/// operators. Values at breakpoints t_k (k >= 1) are post-impulse; the left
/// limit is available separately.
class CauchyPropagator {
 public:
  explicit CauchyPropagator(TransitionCache& cache) : cache_(cache) {}

  const SystemSpec& system() const noexcept { return cache_.system(); }
  TransitionCache& cache() noexcept { return cache_; }

  /// X(t_k), k >= 0.
  const RMatrix& at_breakpoint(long k);
  /// X(t), right-continuous.
  RMatrix operator()(double t);
  /// X(t^-); equals X(t) away from breakpoints.
  RMatrix left_limit(double t);
  /// Value of the solution on interval k extended to its closure, i.e.
  /// E(u, zeta_k) E(t_k, zeta_k)^{-1} X(t_k) for u in [t_k, t_{k+1}].
  RMatrix local(long k, double u);
  RMatrix monodromy();

 private:
  TransitionCache& cache_;
  std::vector<RMatrix> nodes_;
};

CMatrix cauchy_matrix(const SystemSpec& system, double t);
CMatrix monodromy(const SystemSpec& system);

struct Verdict {
  enum class Kind { ExponentiallyStable, Unbounded, PeriodicOmega, PeriodicNOmega, BoundedNonPeriodic, MarginalDefective };
  Kind kind;
  int period = 0;  // N for PeriodicNOmega
  std::string to_string() const;
};

struct ExponentData {
  linalg::Spectrum spectrum;
  std::vector<Complex> multipliers;
  std::vector<Complex> exponents;
  std::vector<double> lyapunov;
  bool oscillatory = false;
};

constexpr double kUnitBand = 1e-8;
constexpr int kMaxPeriodMultiple = 64;

ExponentData floquet_exponents(const CMatrix& monodromy, double omega);

/// Smallest N <= n_max with |X^N - I|_1 <= tol * max(1, |X|_1), if any.
std::optional<int> periodic_solution_test(const CMatrix& monodromy, double tol, int n_max = kMaxPeriodMultiple);

Verdict classify(const CMatrix& monodromy, const ExponentData& data, double tol);

/// (1/omega) Log X(omega), principal branch.
CMatrix floquet_P(const CMatrix& monodromy, double omega);
/// (1/(2 omega)) Log X(omega)^2, real.
RMatrix floquet_P_real(const CMatrix& monodromy, double omega);

/// Q(t) = X(t) exp(-P t).
CMatrix q_factor(CauchyPropagator& propagator, const CMatrix& P, double t);

struct Residual {
  std::string name;
  double value;
  double threshold;
  bool pass() const { return value <= threshold; }
};

enum class NormalForm { Principal, Real };

/// Structural identities of the Floquet normal form, evaluated at
/// deterministic sample times. P is the principal generator (period omega)
/// or, for NormalForm::Real, the real generator of period 2 omega.
std::vector<Residual> verify_normal_form(CauchyPropagator& propagator, const CMatrix& P, int samples,
                                         NormalForm form = NormalForm::Principal);

/// Coefficient periodicity and biperiodicity of Phi, J and E.
std::vector<Residual> verify_structure(const SystemSpec& system, int samples);

/// Closed form for systems whose A, B and C_k are all diagonal; every entry is
/// obtained by scalar adaptive quadrature.
class DiagonalClosedForm {
 public:
  explicit DiagonalClosedForm(const SystemSpec& system);

  const CMatrix& P() const noexcept { return P_; }
  const CMatrix& monodromy() const noexcept { return monodromy_; }
  CMatrix X(double t) const;
  CMatrix Q(double t) const;

 private:
  /// J_i(t, zeta) = 1 + int_zeta^t exp(int_s^zeta a_i) b_i(s) ds.
  double j_entry(int i, double t, double zeta) const;
  double int_a(int i, double from, double to) const;

  const SystemSpec& system_;
  std::vector<std::vector<double>> eta_;  // eta_[i][r-1]
  CMatrix P_;
  CMatrix monodromy_;
};

DiagonalClosedForm closed_form_diagonal(const SystemSpec& system);

struct FloquetReport {
  double omega = 0.0;
  CMatrix monodromy;
  ExponentData exponents;
  std::optional<CMatrix> P;
  std::optional<RMatrix> P_real;
  Verdict verdict{Verdict::Kind::Unbounded};
  HypothesisReport hypothesis;
  std::vector<Residual> residuals;
};

struct AnalyzeOptions {
  bool residuals = true;
  int samples = 16;
};

FloquetReport analyze(const SystemSpec& system, const AnalyzeOptions& options = {});

}  // namespace floquet
