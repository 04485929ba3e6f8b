#pragma once

// Embedded Runge–Kutta 5(4) of Dormand and Prince with Hairer's continuous
// extension. The state is any Eigen dense type (real or complex, vector or
// matrix); error control is the RMS of |err| / (abs + rel * max(|y0|, |y1|)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "floquet/error.hpp"

namespace floquet::ode {

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double initial_step = 0.0;  // 0 selects a step automatically
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 1'000'000;
};

struct Stats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Piecewise quartic interpolant produced by one integration run. Segments
/// are stored in integration order; backward runs are supported.
template <typename State>
class DenseSolution {
 public:
  struct Segment {
    double t0;
    double t1;
    State c[5];
  };

  double t_begin() const noexcept { return t_begin_; }
  double t_end() const noexcept { return t_end_; }
  const State& initial() const noexcept { return initial_; }
  const State& final() const noexcept { return final_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const Stats& stats() const noexcept { return stats_; }

  /// Interpolated state at t. Values outside the covered range are clamped
  /// to the nearest end.
  State operator()(double t) const {
    if (segments_.empty()) return initial_;
    if (t == t_end_) return final_;
    if (t == t_begin_) return initial_;
    const bool forward = t_end_ >= t_begin_;
    // first segment whose far end passes t
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t, [forward](const Segment& s, double value) {
      return forward ? s.t1 < value : s.t1 > value;
    });
    if (it == segments_.end()) return final_;
    const Segment& s = *it;
    const double theta = std::clamp((t - s.t0) / (s.t1 - s.t0), 0.0, 1.0);
    const double theta1 = 1.0 - theta;
    return s.c[0] + theta * (s.c[1] + theta1 * (s.c[2] + theta * (s.c[3] + theta1 * s.c[4])));
  }

 private:
  template <typename S>
  friend class DormandPrince45;

  double t_begin_ = 0.0;
  double t_end_ = 0.0;
  State initial_;
  State final_;
  std::vector<Segment> segments_;
  Stats stats_;
};

template <typename State>
class DormandPrince45 {
 public:
  explicit DormandPrince45(Options options = {}) : opt_(options) {}

  const Options& options() const noexcept { return opt_; }

  /// Integrates y' = f(t, y) from t0 to t1 (either direction). `rhs` is
  /// called as rhs(t, y, dydt) and must fully assign dydt.
  template <typename Rhs>
  DenseSolution<State> integrate(Rhs&& rhs, double t0, const State& y0, double t1) const {
    DenseSolution<State> out;
    out.t_begin_ = t0;
    out.t_end_ = t1;
    out.initial_ = y0;
    out.final_ = y0;
    if (t0 == t1) return out;

    constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                     a76 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    constexpr double safety = 0.9, fac_min = 0.2, fac_max = 10.0, beta = 0.04;
    const double expo = 0.2 - beta * 0.75;

    const double direction = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    const double max_step = std::min(opt_.max_step, span);

    State y = y0;
    State k1, k2, k3, k4, k5, k6, k7, y_stage, y_new, err;
    rhs(t0, y, k1);
    long evals = 1;

    double h = opt_.initial_step > 0.0 ? std::min(opt_.initial_step, max_step) : initial_step(rhs, t0, y, k1, max_step, direction, evals);
    double t = t0;
    double err_old = 1e-4;
    bool last_rejected = false;
    long steps = 0;

    while (direction * (t1 - t) > 0.0) {
      if (++steps > opt_.max_steps) throw NumericalError("ode: maximum number of steps exceeded");
      const double remaining = std::abs(t1 - t);
      bool final_step = false;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        final_step = true;
      }
      if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw NumericalError("ode: step size underflow");
      const double hs = direction * h;

      y_stage = y + hs * (a21 * k1);
      rhs(t + c2 * hs, y_stage, k2);
      y_stage = y + hs * (a31 * k1 + a32 * k2);
      rhs(t + c3 * hs, y_stage, k3);
      y_stage = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      rhs(t + c4 * hs, y_stage, k4);
      y_stage = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      rhs(t + c5 * hs, y_stage, k5);
      y_stage = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      const double t_next = final_step ? t1 : t + hs;
      rhs(t + hs, y_stage, k6);
      y_new = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      rhs(t_next, y_new, k7);
      evals += 6;
      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

      const auto denom = (opt_.abs_tol + opt_.rel_tol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array());
      const double err_norm = std::sqrt((err.cwiseAbs().array() / denom).square().mean());
      if (!std::isfinite(err_norm)) {
        h *= fac_min;
        last_rejected = true;
        ++out.stats_.rejected;
        continue;
      }

      if (err_norm <= 1.0) {
        typename DenseSolution<State>::Segment seg;
        seg.t0 = t;
        seg.t1 = t_next;
        const State ydiff = y_new - y;
        const State bspl = hs * k1 - ydiff;
        seg.c[0] = y;
        seg.c[1] = ydiff;
        seg.c[2] = bspl;
        seg.c[3] = ydiff - hs * k7 - bspl;
        seg.c[4] = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        out.segments_.push_back(std::move(seg));
        ++out.stats_.accepted;

        double fac = std::pow(std::max(err_norm, 1e-16), expo) / std::pow(err_old, beta) / safety;
        fac = std::clamp(1.0 / fac, fac_min, fac_max);
        if (last_rejected) fac = std::min(fac, 1.0);
        err_old = std::max(err_norm, 1e-4);
        last_rejected = false;

        y = y_new;
        k1 = k7;
        t = t_next;
        h = std::min(h * fac, max_step);
      } else {
        const double fac = std::max(fac_min, safety * std::pow(err_norm, -0.2));
        h *= fac;
        last_rejected = true;
        ++out.stats_.rejected;
      }
    }
    out.final_ = y;
    out.stats_.evaluations = evals;
    return out;
  }

 private:
  template <typename Rhs>
  double initial_step(Rhs& rhs, double t0, const State& y0, const State& f0, double max_step, double direction,
                      long& evals) const {
    const auto sk = (opt_.abs_tol + opt_.rel_tol * y0.cwiseAbs().array());
    const double dnf = (f0.cwiseAbs().array() / sk).square().mean();
    const double dny = (y0.cwiseAbs().array() / sk).square().mean();
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, max_step);
    State y1 = y0 + direction * h * f0;
    State f1;
    rhs(t0 + direction * h, y1, f1);
    ++evals;
    const double der2 = std::sqrt(((f1 - f0).cwiseAbs().array() / sk).square().mean()) / h;
    const double der = std::max(std::sqrt(dnf), der2);
    const double h1 = der <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der, 0.2);
    return std::min({100.0 * h, h1, max_step});
  }

  Options opt_;
};

}  // namespace floquet::ode
