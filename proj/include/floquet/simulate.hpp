#pragma once

#include <string>
#include <vector>

#include "floquet/model.hpp"
#include "floquet/types.hpp"

namespace floquet {

enum class RecordKind { Sample, LeftLimit, PostImpulse };

const char* to_string(RecordKind kind);

struct TrajectoryRecord {
  double t;
  RecordKind kind;
  CVector x;
};

/// Sampled solution. Every breakpoint t_k in (0, t_end] appears twice: the
/// left limit x(t_k^-) followed by the post-impulse value x(t_k).
struct Trajectory {
  std::string method;
  Tolerances tolerances;
  std::vector<TrajectoryRecord> records;
};

/// x(t) = W(t, 0) x0 on the output grid plus breakpoints.
Trajectory solve_cauchy(const SystemSpec& system, const CVector& x0, double t_end, double dt_out);

/// Interval-by-interval integration of x' = A x + B x(zeta_k): x(zeta_k) is
/// resolved from the entry value by a linear solve, then the inhomogeneous
/// ODE is integrated across the interval and the impulse applied.
Trajectory solve_direct(const SystemSpec& system, const CVector& x0, double t_end, double dt_out);

/// max over matching records of |x_a - x_b|_inf / max(1, max state norm).
double max_discrepancy(const Trajectory& a, const Trajectory& b);

/// CSV with header `t,kind,re_x1,im_x1,...`.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace floquet
