#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "floquet/expression.hpp"
#include "floquet/types.hpp"

namespace floquet {

/// n x n grid of expressions with a declared period.
class MatrixFunction {
 public:
  MatrixFunction() = default;
  MatrixFunction(int n, std::vector<Expression> entries, double period);

  int dim() const noexcept { return n_; }
  double period() const noexcept { return period_; }
  const Expression& entry(int i, int j) const { return entries_[static_cast<std::size_t>(i * n_ + j)]; }

  RMatrix operator()(double t) const;
  void eval_into(double t, RMatrix& out) const;

  /// max over `samples` pseudo-random t in [0, period) of
  /// |M(t + period) - M(t)|_1 / max(1, |M(t)|_1). Deterministic.
  double periodicity_defect(int samples = 200) const;

  bool is_diagonal() const;
  bool is_zero() const;

 private:
  int n_ = 0;
  std::vector<Expression> entries_;
  double period_ = 0.0;
};

/// Generalized piecewise-constant argument on one fundamental period,
/// extended by t_{k+p} = t_k + omega and zeta_{k+p} = zeta_k + omega.
/// Interval k is [t_k, t_{k+1}); gamma(t) = zeta_{k(t)}.
class ArgumentGrid {
 public:
  ArgumentGrid() = default;
  /// `times` has p+1 entries starting at 0 with times[p] <= omega; `args` has p.
  /// Throws InputError on any violation.
  ArgumentGrid(double omega, std::vector<double> times, std::vector<double> args);

  double omega() const noexcept { return omega_; }
  int p() const noexcept { return static_cast<int>(args_.size()); }
  const std::vector<double>& base_times() const noexcept { return times_; }
  const std::vector<double>& base_args() const noexcept { return args_; }

  /// Global breakpoint t_k for any integer k.
  double time(long k) const;
  /// Global argument zeta_k for any integer k.
  double arg(long k) const;
  /// The unique k with t_k <= t < t_{k+1}.
  long interval_of(double t) const;

 private:
  double omega_ = 0.0;
  std::vector<double> times_;
  std::vector<double> args_;
};

struct GammaValue {
  long k;
  double zeta;
};

GammaValue gamma_at(const ArgumentGrid& grid, double t);

struct Tolerances {
  double ode_abs = 1e-10;
  double ode_rel = 1e-10;
  double alg = 1e-9;
};

/// One omega-periodic linear IDEPCAG:
///   x'(t) = A(t) x(t) + B(t) x(gamma(t)),   x(t_k) = (I + C_k) x(t_k^-).
/// Impulses are indexed so that impulses[r-1] is C_r, applied at t_r (r = 1..p).
struct SystemSpec {
  int n = 0;
  double omega = 0.0;
  MatrixFunction A;
  MatrixFunction B;
  std::vector<RMatrix> impulses;
  ArgumentGrid grid;
  Tolerances tol;

  int p() const noexcept { return grid.p(); }
  /// C_k with cyclic extension C_{k+p} = C_k (k may be any integer).
  const RMatrix& impulse(long k) const;
  /// I + C_k.
  RMatrix jump(long k) const;
  bool is_diagonal() const;
};

struct LoadOptions {
  /// When false, a failed coefficient periodicity certificate is not an
  /// error; the verify command reports it as a residual instead.
  bool enforce_periodicity = true;
};

/// Parses and validates a system document (JSON). Errors name the field path.
SystemSpec load_system(std::string_view document, const LoadOptions& options = {});
SystemSpec load_system_file(const std::string& path, const LoadOptions& options = {});

}  // namespace floquet
