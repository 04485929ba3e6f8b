#include "floquet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "floquet/error.hpp"
#include "floquet/floquet.hpp"
#include "floquet/linalg.hpp"
#include "floquet/ode.hpp"

namespace floquet {

const char* to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Sample: return "sample";
    case RecordKind::LeftLimit: return "left_limit";
    case RecordKind::PostImpulse: return "post_impulse";
  }
  return "";
}

namespace {

struct Event {
  double t;
  RecordKind kind;
  long k;  // interval owning the event; breakpoint index for impulse records
};

void check_request(const SystemSpec& system, const CVector& x0, double t_end, double dt_out) {
  if (x0.size() != system.n)
    throw InputError("x0: expected " + std::to_string(system.n) + " components, got " + std::to_string(x0.size()));
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("t-end: must be a positive finite number");
  if (!(dt_out > 0.0) || !std::isfinite(dt_out)) throw InputError("dt-out: must be a positive finite number");
  if (t_end / dt_out > 1e7) throw InputError("dt-out: too many output samples");
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

/// Output grid i*dt_out (and t_end) merged with breakpoint pairs in (0, t_end].
std::vector<Event> output_events(const SystemSpec& system, double t_end, double dt_out) {
  const ArgumentGrid& grid = system.grid;
  std::vector<Event> events;
  std::vector<double> breakpoints;
  for (long k = 1; grid.time(k) <= t_end * (1.0 + 1e-14); ++k) breakpoints.push_back(grid.time(k));

  auto on_breakpoint = [&](double t) {
    return std::any_of(breakpoints.begin(), breakpoints.end(), [&](double b) { return near(t, b); });
  };
  const long count = static_cast<long>(std::floor(t_end / dt_out * (1.0 + 1e-12)));
  for (long i = 0; i <= count; ++i) {
    const double t = std::min(i * dt_out, t_end);
    if (i > 0 && on_breakpoint(t)) continue;
    events.push_back({t, RecordKind::Sample, grid.interval_of(t)});
  }
  if (!near(count * dt_out, t_end) && !on_breakpoint(t_end))
    events.push_back({t_end, RecordKind::Sample, grid.interval_of(t_end)});
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const long k = static_cast<long>(i) + 1;
    events.push_back({breakpoints[i], RecordKind::LeftLimit, k});
    events.push_back({breakpoints[i], RecordKind::PostImpulse, k});
  }
  std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return events;
}

}  // namespace

Trajectory solve_cauchy(const SystemSpec& system, const CVector& x0, double t_end, double dt_out) {
  check_request(system, x0, t_end, dt_out);
  TransitionCache cache(system);
  CauchyPropagator propagator(cache);
  Trajectory out{"cauchy", system.tol, {}};
  for (const Event& ev : output_events(system, t_end, dt_out)) {
    const RMatrix w = ev.kind == RecordKind::LeftLimit ? propagator.left_limit(ev.t) : propagator(ev.t);
    out.records.push_back({ev.t, ev.kind, w.cast<Complex>() * x0});
  }
  return out;
}

Trajectory solve_direct(const SystemSpec& system, const CVector& x0, double t_end, double dt_out) {
  check_request(system, x0, t_end, dt_out);
  const int n = system.n;
  const ArgumentGrid& grid = system.grid;
  const std::vector<Event> events = output_events(system, t_end, dt_out);
  Trajectory out{"direct", system.tol, {}};

  ode::Options opt;
  opt.abs_tol = system.tol.ode_abs;
  opt.rel_tol = system.tol.ode_rel;

  RMatrix a(n, n), b(n, n);
  CVector entry = x0;
  std::size_t next = 0;
  for (long k = 0; next < events.size(); ++k) {
    const double tk = grid.time(k), tk1 = grid.time(k + 1), zeta = grid.arg(k);
    opt.max_step = (tk1 - tk) / 4.0;

    // resolve the piecewise-constant argument: x(zeta) = Phi x_k + G x(zeta)
    CVector x_zeta = entry;
    if (zeta != tk) {
      auto rhs = [&](double u, const RMatrix& y, RMatrix& dy) {
        system.A.eval_into(u, a);
        system.B.eval_into(u, b);
        dy.resize(n, 2 * n);
        dy.leftCols(n).noalias() = a * y.leftCols(n);
        dy.rightCols(n).noalias() = a * y.rightCols(n);
        dy.rightCols(n) += b;
      };
      RMatrix y0 = RMatrix::Zero(n, 2 * n);
      y0.leftCols(n).setIdentity();
      const RMatrix y = ode::DormandPrince45<RMatrix>(opt).integrate(rhs, tk, y0, zeta).final();
      const RMatrix lhs = RMatrix::Identity(n, n) - y.rightCols(n);
      const double det = lhs.determinant();
      if (!(std::abs(det) > 1e-12 * std::max(1.0, std::pow(linalg::norm1(lhs), n))))
        throw SingularMatrixError("interval " + std::to_string(k) +
                                  ": the argument value x(zeta_k) cannot be resolved (singular J)");
      x_zeta = lhs.cast<Complex>().partialPivLu().solve(y.leftCols(n).cast<Complex>() * entry);
    }

    const double span_end = std::min(tk1, std::max(t_end, tk));
    const CVector held = x_zeta;
    auto rhs = [&](double u, const CVector& x, CVector& dx) {
      system.A.eval_into(u, a);
      system.B.eval_into(u, b);
      dx.noalias() = a.cast<Complex>() * x;
      dx.noalias() += b.cast<Complex>() * held;
    };
    const auto sol = ode::DormandPrince45<CVector>(opt).integrate(rhs, tk, entry, span_end);

    CVector left = sol.final();
    while (next < events.size()) {
      const Event& ev = events[next];
      if (ev.kind == RecordKind::Sample && ev.k == k) {
        out.records.push_back({ev.t, ev.kind, ev.t == tk ? entry : sol(ev.t)});
      } else if (ev.kind == RecordKind::LeftLimit && ev.k == k + 1) {
        out.records.push_back({ev.t, ev.kind, left});
      } else if (ev.kind == RecordKind::PostImpulse && ev.k == k + 1) {
        out.records.push_back({ev.t, ev.kind, system.jump(k + 1).cast<Complex>() * left});
      } else {
        break;
      }
      ++next;
    }
    entry = system.jump(k + 1).cast<Complex>() * left;
  }
  return out;
}

double max_discrepancy(const Trajectory& a, const Trajectory& b) {
  if (a.records.size() != b.records.size()) throw InputError("trajectories have different sample grids");
  double scale = 1.0, worst = 0.0;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    scale = std::max({scale, a.records[i].x.cwiseAbs().maxCoeff(), b.records[i].x.cwiseAbs().maxCoeff()});
    worst = std::max(worst, (a.records[i].x - b.records[i].x).cwiseAbs().maxCoeff());
  }
  return worst / scale;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  os << "t,kind";
  const Eigen::Index n = trajectory.records.empty() ? 0 : trajectory.records.front().x.size();
  for (Eigen::Index i = 1; i <= n; ++i) os << ",re_x" << i << ",im_x" << i;
  os << '\n';
  char buf[64];
  for (const auto& r : trajectory.records) {
    std::snprintf(buf, sizeof buf, "%.12e", r.t);
    os << buf << ',' << to_string(r.kind);
    for (Eigen::Index i = 0; i < r.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, ",%.12e,%.12e", r.x(i).real(), r.x(i).imag());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace floquet
