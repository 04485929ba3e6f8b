#include "floquet/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "floquet/error.hpp"
#include "floquet/log.hpp"
#include "floquet/quadrature.hpp"

namespace floquet {

namespace {

double norm1(const CMatrix& m) { return linalg::norm1<double>(m); }
double norm1(const RMatrix& m) { return linalg::norm1(m); }

CMatrix complexify(const RMatrix& m) { return m.cast<Complex>(); }

}  // namespace

// ---------------------------------------------------------------------------
// Cauchy matrix

const RMatrix& CauchyPropagator::at_breakpoint(long k) {
  if (k < 0) throw InputError("Cauchy matrix is defined for t >= 0 only");
  const SystemSpec& sys = system();
  if (nodes_.empty()) nodes_.push_back(RMatrix::Identity(sys.n, sys.n));
  while (static_cast<long>(nodes_.size()) <= k) {
    const long r = static_cast<long>(nodes_.size());  // build X(t_r) from X(t_{r-1})
    const IntervalOperators& ops = cache_.interval(r - 1);
    RMatrix next = sys.jump(r) * (ops.e_right() * (ops.e_left_inv() * nodes_.back()));
    nodes_.push_back(std::move(next));
  }
  return nodes_[static_cast<std::size_t>(k)];
}

RMatrix CauchyPropagator::local(long k, double u) {
  const RMatrix& xk = at_breakpoint(k);
  const IntervalOperators& ops = cache_.interval(k);
  return ops.e(u) * (ops.e_left_inv() * xk);
}

RMatrix CauchyPropagator::operator()(double t) {
  if (!(t >= 0.0)) throw InputError("Cauchy matrix is defined for t >= 0 only");
  const long k = system().grid.interval_of(t);
  if (t == system().grid.time(k)) return at_breakpoint(k);
  return local(k, t);
}

RMatrix CauchyPropagator::left_limit(double t) {
  if (!(t >= 0.0)) throw InputError("Cauchy matrix is defined for t >= 0 only");
  const long k = system().grid.interval_of(t);
  if (k >= 1 && t == system().grid.time(k)) return local(k - 1, t);
  return (*this)(t);
}

RMatrix CauchyPropagator::monodromy() { return at_breakpoint(system().p()); }

CMatrix cauchy_matrix(const SystemSpec& system, double t) {
  if (!(t >= 0.0)) throw InputError("Cauchy matrix is defined for t >= 0 only");
  TransitionCache cache(system);
  const long kt = system.grid.interval_of(t);
  // A_n ... A_1 with A_r = (I + C_r) W(t_r, t_{r-1})
  RMatrix product = RMatrix::Identity(system.n, system.n);
  for (long r = 1; r <= kt; ++r) {
    const IntervalOperators& ops = cache.interval(r - 1);
    product = (system.jump(r) * ops.w(ops.t_left(), ops.t_right()) * product).eval();
  }
  const IntervalOperators& last = cache.interval(kt);
  return complexify(last.w(last.t_left(), t) * product);
}

CMatrix monodromy(const SystemSpec& system) {
  TransitionCache cache(system);
  RMatrix x = RMatrix::Identity(system.n, system.n);
  for (long r = 1; r <= system.p(); ++r) {
    const IntervalOperators& ops = cache.interval(r - 1);
    const RMatrix e_inv = linalg::inv<double>(complexify(ops.e_left())).real();
    x = (system.jump(r) * ops.e_right() * e_inv * x).eval();
  }
  return complexify(x);
}

// ---------------------------------------------------------------------------
// Multipliers, exponents, verdict

std::string Verdict::to_string() const {
  switch (kind) {
    case Kind::ExponentiallyStable: return "ExponentiallyStable";
    case Kind::Unbounded: return "Unbounded";
    case Kind::PeriodicOmega: return "PeriodicOmega";
    case Kind::PeriodicNOmega: return "PeriodicNOmega(" + std::to_string(period) + ")";
    case Kind::BoundedNonPeriodic: return "BoundedNonPeriodic";
    case Kind::MarginalDefective: return "MarginalDefective";
  }
  return "";
}

ExponentData floquet_exponents(const CMatrix& monodromy, double omega) {
  ExponentData data;
  data.spectrum = linalg::eig<double>(monodromy);
  data.multipliers = data.spectrum.eigenvalues;
  const double scale = std::max(1.0, norm1(monodromy));
  for (const Complex& rho : data.multipliers) {
    if (!(std::abs(rho) > 1e-14 * scale))
      throw SingularMatrixError("monodromy matrix is singular; the Cauchy matrix must be invertible");
    const Complex lambda = linalg::principal_log(rho) / omega;
    data.exponents.push_back(lambda);
    data.lyapunov.push_back(lambda.real());
    if (std::abs(rho.imag()) > 1e-7 * std::abs(rho) || rho.real() < 0.0) data.oscillatory = true;
  }
  return data;
}

std::optional<int> periodic_solution_test(const CMatrix& monodromy, double tol, int n_max) {
  const Eigen::Index n = monodromy.rows();
  const double bound = tol * std::max(1.0, norm1(monodromy));
  const CMatrix id = CMatrix::Identity(n, n);
  CMatrix power = monodromy;
  for (int N = 1; N <= n_max; ++N) {
    if (!power.allFinite()) break;
    if (norm1(CMatrix(power - id)) <= bound) return N;
    power = (power * monodromy).eval();
  }
  return std::nullopt;
}

namespace {

/// Every unit-band eigenvalue cluster has geometric multiplicity equal to its
/// algebraic multiplicity (rank test on X - rho I).
bool unit_band_semisimple(const CMatrix& x, const std::vector<Complex>& values) {
  const Eigen::Index n = x.rows();
  const double scale = std::max(1.0, norm1(x));
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i] || std::abs(std::abs(values[i]) - 1.0) > kUnitBand) continue;
    Complex center = 0.0;
    int m = 0;
    for (std::size_t j = i; j < values.size(); ++j) {
      if (!used[j] && std::abs(values[j] - values[i]) <= 1e-6) {
        used[j] = true;
        center += values[j];
        ++m;
      }
    }
    center /= static_cast<double>(m);
    Eigen::JacobiSVD<CMatrix> svd(x - center * CMatrix::Identity(n, n));
    const auto& sv = svd.singularValues();
    int null_dim = 0;
    for (Eigen::Index s = 0; s < sv.size(); ++s)
      if (sv(s) <= 1e-7 * scale) ++null_dim;
    if (null_dim < m) return false;
  }
  return true;
}

}  // namespace

Verdict classify(const CMatrix& monodromy, const ExponentData& data, double tol) {
  using Kind = Verdict::Kind;
  bool all_inside = true, any_outside = false;
  for (const Complex& rho : data.multipliers) {
    const double r = std::abs(rho);
    if (!(r < 1.0 - kUnitBand)) all_inside = false;
    if (r > 1.0 + kUnitBand) any_outside = true;
  }
  if (all_inside) return {Kind::ExponentiallyStable};
  if (any_outside) return {Kind::Unbounded};
  if (auto N = periodic_solution_test(monodromy, tol)) {
    if (*N == 1) return {Kind::PeriodicOmega};
    return {Kind::PeriodicNOmega, *N};
  }
  if (unit_band_semisimple(monodromy, data.multipliers)) return {Kind::BoundedNonPeriodic};
  log_message(LogLevel::Warn, "defective multiplier on the unit circle: solutions may grow polynomially");
  return {Kind::MarginalDefective};
}

CMatrix floquet_P(const CMatrix& monodromy, double omega) {
  return linalg::logm_principal<double>(monodromy) / omega;
}

RMatrix floquet_P_real(const CMatrix& monodromy, double omega) {
  return linalg::logm_real_doubled<double>(monodromy).real() / (2.0 * omega);
}

CMatrix q_factor(CauchyPropagator& propagator, const CMatrix& P, double t) {
  return complexify(propagator(t)) * linalg::expm<double>(CMatrix(-P * t));
}

// ---------------------------------------------------------------------------
// Residuals

namespace {

constexpr double kFdStep = 1e-5;

/// Sample time in [0, span) kept at least `margin` away from breakpoints so a
/// finite-difference stencil stays inside one interval.
double interior_time(const ArgumentGrid& grid, double t, double margin) {
  const long k = grid.interval_of(t);
  const double lo = grid.time(k), hi = grid.time(k + 1);
  if (hi - lo <= 2.0 * margin) return 0.5 * (lo + hi);
  return std::clamp(t, lo + margin, hi - margin);
}

}  // namespace

std::vector<Residual> verify_normal_form(CauchyPropagator& propagator, const CMatrix& P, int samples,
                                         NormalForm form) {
  const SystemSpec& sys = propagator.system();
  const ArgumentGrid& grid = sys.grid;
  const int n = sys.n;
  const double omega = sys.omega;
  const int periods = form == NormalForm::Real ? 2 : 1;
  const double T = periods * omega;
  samples = std::max(samples, 1);

  const RMatrix x_omega = propagator.monodromy();
  const CMatrix xc_omega = complexify(x_omega);
  auto expm = [](const CMatrix& m) { return linalg::expm<double>(m); };
  auto q_at = [&](double t) { return CMatrix(complexify(propagator(t)) * expm(-P * t)); };
  auto q_left = [&](double t) { return CMatrix(complexify(propagator.left_limit(t)) * expm(-P * t)); };

  double factorization = 0.0, q_period = 0.0, impulse = 0.0, q_eq = 0.0, reduction = 0.0;
  RMatrix a(n, n), b(n, n);
  for (int i = 0; i < samples; ++i) {
    const double t = omega * (i + 0.37) / samples;
    const RMatrix xt = propagator(t);
    factorization = std::max(factorization, norm1(RMatrix(propagator(t + omega) - xt * x_omega)) /
                                                std::max(1.0, norm1(xt) * norm1(x_omega)));

    const double tq = T * (i + 0.37) / samples;
    const CMatrix q = q_at(tq);
    q_period = std::max(q_period, norm1(CMatrix(q_at(tq + T) - q)) / std::max(1.0, norm1(q)));

    // Q' = A Q - Q P + B Q(gamma) e^{P (gamma - t)}, by a 5-point stencil
    const double s = interior_time(grid, tq, 4.0 * kFdStep + 1e-4);
    const double h = kFdStep;
    const CMatrix qs = q_at(s);
    const CMatrix dq = (-q_at(s + 2 * h) + 8.0 * q_at(s + h) - 8.0 * q_at(s - h) + q_at(s - 2 * h)) / (12.0 * h);
    sys.A.eval_into(s, a);
    sys.B.eval_into(s, b);
    const GammaValue g = gamma_at(grid, s);
    const CMatrix q_gamma = complexify(propagator.local(g.k, g.zeta)) * expm(-P * g.zeta);
    const CMatrix aq = a.cast<Complex>() * qs;
    const CMatrix qp = qs * P;
    const CMatrix delayed = b.cast<Complex>() * q_gamma * expm(P * (g.zeta - s));
    const double eq_scale = 1.0 + norm1(aq) + norm1(qp) + norm1(delayed);
    q_eq = std::max(q_eq, norm1(CMatrix(dq - (aq - qp + delayed))) / eq_scale);

    // Y = Q^{-1} X solves Y' = P Y
    auto y_at = [&](double u) {
      return CMatrix(linalg::inv<double>(q_at(u)) * complexify(propagator(u)));
    };
    const CMatrix ys = y_at(s);
    const CMatrix dy = (-y_at(s + 2 * h) + 8.0 * y_at(s + h) - 8.0 * y_at(s - h) + y_at(s - 2 * h)) / (12.0 * h);
    const CMatrix py = P * ys;
    reduction = std::max(reduction, norm1(CMatrix(dy - py)) / (1.0 + norm1(py)));
  }

  for (long k = 1; k <= static_cast<long>(periods) * sys.p(); ++k) {
    const double tk = grid.time(k);
    const CMatrix q = q_at(tk);
    const CMatrix jump = complexify(sys.jump(k));
    impulse = std::max(impulse, norm1(CMatrix(q - jump * q_left(tk))) / std::max(1.0, norm1(q)));
  }

  const ExponentData data = floquet_exponents(xc_omega, omega);
  Complex prod = 1.0;
  for (const Complex& rho : data.multipliers) prod *= rho;
  const Complex det = xc_omega.determinant();
  const double det_res = std::abs(det - prod) / std::max(std::abs(det), std::numeric_limits<double>::min());

  const CMatrix target = linalg::matrix_power<double>(xc_omega, static_cast<unsigned>(periods));
  const double roundtrip = norm1(CMatrix(expm(P * T) - target)) / std::max(norm1(target), 1e-300);

  const CMatrix direct = monodromy(sys);
  const double mono = norm1(CMatrix(direct - xc_omega)) / std::max(norm1(xc_omega), 1e-300);

  return {
      {"factorization", factorization, 1e-6},
      {"q_periodicity", q_period, 1e-6},
      {"impulse_consistency", impulse, 1e-9},
      {"q_equation", q_eq, 1e-5},
      {"reduction", reduction, 1e-5},
      {"det_product", det_res, 1e-8},
      {"expm_roundtrip", roundtrip, 1e-8},
      {"monodromy_cauchy", mono, 1e-8},
  };
}

std::vector<Residual> verify_structure(const SystemSpec& system, int samples) {
  const double omega = system.omega;
  std::mt19937_64 rng(0x5851f42d4c957f2dULL);
  std::uniform_real_distribution<double> uni(0.0, omega);
  double phi = 0.0, j = 0.0, e = 0.0;
  const int pairs = std::clamp(samples / 4, 2, 6);
  for (int i = 0; i < pairs; ++i) {
    const double s = uni(rng), t = uni(rng);
    const CMatrix p0 = fundamental_matrix(system, s, t), p1 = fundamental_matrix(system, s + omega, t + omega);
    const CMatrix j0 = j_matrix(system, s, t), j1 = j_matrix(system, s + omega, t + omega);
    const CMatrix e0 = p0 * j0, e1 = p1 * j1;
    phi = std::max(phi, norm1(CMatrix(p1 - p0)) / std::max(1.0, norm1(p0)));
    j = std::max(j, norm1(CMatrix(j1 - j0)) / std::max(1.0, norm1(j0)));
    e = std::max(e, norm1(CMatrix(e1 - e0)) / std::max(1.0, norm1(e0)));
  }
  return {
      {"periodicity_A", system.A.periodicity_defect(), 1e-9},
      {"periodicity_B", system.B.periodicity_defect(), 1e-9},
      {"biperiodicity_phi", phi, 1e-7},
      {"biperiodicity_j", j, 1e-7},
      {"biperiodicity_e", e, 1e-7},
  };
}

// ---------------------------------------------------------------------------
// Diagonal closed form

DiagonalClosedForm::DiagonalClosedForm(const SystemSpec& system) : system_(system) {
  if (!system.is_diagonal()) throw InputError("closed form requires diagonal A(t), B(t) and C_k");
  const int n = system.n, p = system.p();
  const ArgumentGrid& grid = system.grid;
  P_ = CMatrix::Zero(n, n);
  monodromy_ = CMatrix::Zero(n, n);
  eta_.assign(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(p)));
  for (int i = 0; i < n; ++i) {
    const double total_a = int_a(i, 0.0, system.omega);
    Complex log_sum = total_a;
    double prod = std::exp(total_a);
    for (int r = 1; r <= p; ++r) {
      const double zeta = grid.arg(r - 1);
      const double eta = (1.0 + system.impulse(r)(i, i)) * j_entry(i, grid.time(r), zeta) /
                         j_entry(i, grid.time(r - 1), zeta);
      eta_[static_cast<std::size_t>(i)][static_cast<std::size_t>(r - 1)] = eta;
      log_sum += linalg::principal_log(Complex(eta));
      prod *= eta;
    }
    P_(i, i) = log_sum / system.omega;
    monodromy_(i, i) = prod;
  }
}

double DiagonalClosedForm::int_a(int i, double from, double to) const {
  const Expression& a = system_.A.entry(i, i);
  return integrate_adaptive([&](double u) { return a(u); }, from, to);
}

double DiagonalClosedForm::j_entry(int i, double t, double zeta) const {
  const Expression& b = system_.B.entry(i, i);
  return 1.0 + integrate_adaptive([&](double s) { return std::exp(int_a(i, s, zeta)) * b(s); }, zeta, t);
}

CMatrix DiagonalClosedForm::X(double t) const {
  if (!(t >= 0.0)) throw InputError("closed form is defined for t >= 0 only");
  const int n = system_.n, p = system_.p();
  const ArgumentGrid& grid = system_.grid;
  const long k = grid.interval_of(t);
  CMatrix x = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double prod = std::exp(int_a(i, 0.0, t));
    for (long r = 1; r <= k; ++r) prod *= eta_[static_cast<std::size_t>(i)][static_cast<std::size_t>((r - 1) % p)];
    const double zeta = grid.arg(k);
    x(i, i) = prod * j_entry(i, t, zeta) / j_entry(i, grid.time(k), zeta);
  }
  return x;
}

CMatrix DiagonalClosedForm::Q(double t) const {
  CMatrix q = X(t);
  for (Eigen::Index i = 0; i < q.rows(); ++i) q(i, i) *= std::exp(-P_(i, i) * t);
  return q;
}

DiagonalClosedForm closed_form_diagonal(const SystemSpec& system) { return DiagonalClosedForm(system); }

// ---------------------------------------------------------------------------

FloquetReport analyze(const SystemSpec& system, const AnalyzeOptions& options) {
  FloquetReport report;
  report.omega = system.omega;
  report.hypothesis = hypothesis_check(system);

  TransitionCache cache(system);
  CauchyPropagator propagator(cache);
  report.monodromy = complexify(propagator.monodromy());
  report.exponents = floquet_exponents(report.monodromy, system.omega);
  report.verdict = classify(report.monodromy, report.exponents, system.tol.alg);

  try {
    report.P = floquet_P(report.monodromy, system.omega);
  } catch (const NumericalError& e) {
    log_message(LogLevel::Warn, std::string("principal logarithm unavailable: ") + e.what());
  }
  try {
    report.P_real = floquet_P_real(report.monodromy, system.omega);
  } catch (const Error& e) {
    log_message(LogLevel::Info, std::string("real generator unavailable: ") + e.what());
  }

  if (options.residuals && report.P) {
    report.residuals = verify_normal_form(propagator, *report.P, options.samples);
    auto structure = verify_structure(system, options.samples);
    report.residuals.insert(report.residuals.end(), structure.begin(), structure.end());
  }
  return report;
}

}  // namespace floquet
