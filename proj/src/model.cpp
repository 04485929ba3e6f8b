#include "floquet/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "floquet/error.hpp"

namespace floquet {

MatrixFunction::MatrixFunction(int n, std::vector<Expression> entries, double period)
    : n_(n), entries_(std::move(entries)), period_(period) {
  if (n <= 0 || entries_.size() != static_cast<std::size_t>(n * n))
    throw InputError("matrix function needs n*n entries");
  if (!(period > 0.0) || !std::isfinite(period)) throw InputError("matrix function period must be positive");
}

void MatrixFunction::eval_into(double t, RMatrix& out) const {
  out.resize(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out(i, j) = entry(i, j)(t);
}

RMatrix MatrixFunction::operator()(double t) const {
  RMatrix m;
  eval_into(t, m);
  return m;
}

double MatrixFunction::periodicity_defect(int samples) const {
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  double worst = 0.0;
  RMatrix a, b;
  for (int s = 0; s < samples; ++s) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double t = u * period_;
    eval_into(t, a);
    eval_into(t + period_, b);
    const double scale = std::max(1.0, a.cwiseAbs().colwise().sum().maxCoeff());
    worst = std::max(worst, (b - a).cwiseAbs().colwise().sum().maxCoeff() / scale);
  }
  return worst;
}

bool MatrixFunction::is_diagonal() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && !entry(i, j).is_identically_zero()) return false;
  return true;
}

bool MatrixFunction::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Expression& e) { return e.is_identically_zero(); });
}

ArgumentGrid::ArgumentGrid(double omega, std::vector<double> times, std::vector<double> args)
    : omega_(omega), times_(std::move(times)), args_(std::move(args)) {
  if (!(omega_ > 0.0) || !std::isfinite(omega_)) throw InputError("omega: must be a positive finite number");
  const std::size_t p = args_.size();
  if (p == 0) throw InputError("p: must be at least 1");
  if (times_.size() != p + 1) throw InputError("times: expected p+1 entries");
  if (times_[0] != 0.0) throw InputError("times[0]: must be 0");
  for (std::size_t k = 0; k < p; ++k) {
    if (!(times_[k] < times_[k + 1]))
      throw InputError("times[" + std::to_string(k + 1) + "]: breakpoints must be strictly increasing");
  }
  if (times_[p] > omega_ * (1.0 + 1e-14))
    throw InputError("times[" + std::to_string(p) + "]: last breakpoint exceeds omega");
  for (std::size_t k = 0; k < p; ++k) {
    if (!std::isfinite(args_[k]) || args_[k] < times_[k] || args_[k] > times_[k + 1])
      throw InputError("args[" + std::to_string(k) + "]: zeta_k must lie in [t_k, t_{k+1}]");
  }
}

namespace {

long floor_div(long a, long b) {
  long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

double ArgumentGrid::time(long k) const {
  const long pp = p();
  const long q = floor_div(k, pp);
  const long r = k - q * pp;
  return times_[static_cast<std::size_t>(r)] + static_cast<double>(q) * omega_;
}

double ArgumentGrid::arg(long k) const {
  const long pp = p();
  const long q = floor_div(k, pp);
  const long r = k - q * pp;
  return args_[static_cast<std::size_t>(r)] + static_cast<double>(q) * omega_;
}

long ArgumentGrid::interval_of(double t) const {
  const double q = std::floor(t / omega_);
  const double s = t - q * omega_;
  const auto it = std::upper_bound(times_.begin(), times_.end() - 1, s);
  long r = static_cast<long>(it - times_.begin()) - 1;
  if (r < 0) r = 0;
  long k = static_cast<long>(q) * p() + r;
  // Breakpoints are generated by time(k); settle against that formula so a
  // breakpoint always belongs to the interval it opens.
  while (time(k + 1) <= t) ++k;
  while (time(k) > t) --k;
  return k;
}

GammaValue gamma_at(const ArgumentGrid& grid, double t) {
  const long k = grid.interval_of(t);
  return {k, grid.arg(k)};
}

const RMatrix& SystemSpec::impulse(long k) const {
  const long pp = p();
  const long idx = ((k - 1) % pp + pp) % pp;
  return impulses[static_cast<std::size_t>(idx)];
}

RMatrix SystemSpec::jump(long k) const { return RMatrix::Identity(n, n) + impulse(k); }

bool SystemSpec::is_diagonal() const {
  if (!A.is_diagonal() || !B.is_diagonal()) return false;
  for (const auto& c : impulses) {
    RMatrix off = c;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw InputError(path + ": " + msg); }

double number_at(const json& doc, const std::string& path) {
  if (!doc.is_number()) fail(path, "expected a number");
  const double v = doc.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

Expression expression_at(const json& doc, const std::string& path) {
  if (doc.is_number()) return Expression::constant(number_at(doc, path));
  if (!doc.is_string()) fail(path, "expected an expression string");
  try {
    return parse_expression(doc.get<std::string>());
  } catch (const ParseError& e) {
    fail(path, e.what());
  }
}

MatrixFunction matrix_function_at(const json& doc, const std::string& path, int n, double omega) {
  if (!doc.is_array() || doc.size() != static_cast<std::size_t>(n)) fail(path, "expected an array of n rows");
  std::vector<Expression> entries;
  for (int i = 0; i < n; ++i) {
    const auto& row = doc[static_cast<std::size_t>(i)];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) fail(rp, "expected a row of n entries");
    for (int j = 0; j < n; ++j)
      entries.push_back(expression_at(row[static_cast<std::size_t>(j)], rp + "[" + std::to_string(j) + "]"));
  }
  return MatrixFunction(n, std::move(entries), omega);
}

RMatrix constant_matrix_at(const json& doc, const std::string& path, int n) {
  if (!doc.is_array() || doc.size() != static_cast<std::size_t>(n)) fail(path, "expected an array of n rows");
  RMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& row = doc[static_cast<std::size_t>(i)];
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) fail(rp, "expected a row of n entries");
    for (int j = 0; j < n; ++j) {
      const std::string ep = rp + "[" + std::to_string(j) + "]";
      const auto& cell = row[static_cast<std::size_t>(j)];
      if (cell.is_string()) {
        const Expression e = expression_at(cell, ep);
        if (!e.is_constant()) fail(ep, "impulse entries must not depend on t");
        m(i, j) = e(0.0);
      } else {
        m(i, j) = number_at(cell, ep);
      }
    }
  }
  return m;
}

std::vector<double> number_list_at(const json& doc, const std::string& path) {
  if (!doc.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < doc.size(); ++i)
    out.push_back(number_at(doc[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

const json& field(const json& doc, const char* name) {
  if (!doc.contains(name)) fail(name, "missing required field");
  return doc.at(name);
}

}  // namespace

SystemSpec load_system(std::string_view document, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("document: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("document: expected a JSON object");

  SystemSpec sys;
  const auto& n_field = field(doc, "n");
  if (!n_field.is_number_integer() || n_field.get<int>() < 1 || n_field.get<int>() > 16)
    fail("n", "expected an integer in [1, 16]");
  sys.n = n_field.get<int>();
  sys.omega = number_at(field(doc, "omega"), "omega");
  if (!(sys.omega > 0.0)) fail("omega", "must be positive");
  const auto& p_field = field(doc, "p");
  if (!p_field.is_number_integer() || p_field.get<int>() < 1) fail("p", "expected a positive integer");
  const int p = p_field.get<int>();

  auto times = number_list_at(field(doc, "times"), "times");
  auto args = number_list_at(field(doc, "args"), "args");
  if (times.size() != static_cast<std::size_t>(p + 1)) fail("times", "expected p+1 entries");
  if (args.size() != static_cast<std::size_t>(p)) fail("args", "expected p entries");
  sys.grid = ArgumentGrid(sys.omega, std::move(times), std::move(args));

  sys.A = matrix_function_at(field(doc, "A"), "A", sys.n, sys.omega);
  sys.B = matrix_function_at(field(doc, "B"), "B", sys.n, sys.omega);

  const auto& imp = field(doc, "impulses");
  if (!imp.is_array() || imp.size() != static_cast<std::size_t>(p)) fail("impulses", "expected p matrices");
  for (int k = 0; k < p; ++k) {
    const std::string path = "impulses[" + std::to_string(k) + "]";
    RMatrix c = constant_matrix_at(imp[static_cast<std::size_t>(k)], path, sys.n);
    const double det = (RMatrix::Identity(sys.n, sys.n) + c).determinant();
    if (!(std::abs(det) > 1e-12)) fail(path, "I + C_k is not invertible (|det| <= 1e-12)");
    sys.impulses.push_back(std::move(c));
  }

  if (doc.contains("tolerances")) {
    const auto& tol = doc.at("tolerances");
    if (!tol.is_object()) fail("tolerances", "expected an object");
    auto read = [&](const char* key, double& target) {
      if (!tol.contains(key)) return;
      target = number_at(tol.at(key), std::string("tolerances.") + key);
      if (!(target > 0.0)) fail(std::string("tolerances.") + key, "must be positive");
    };
    read("ode_abs", sys.tol.ode_abs);
    read("ode_rel", sys.tol.ode_rel);
    read("alg", sys.tol.alg);
  }

  if (options.enforce_periodicity) {
    if (sys.A.periodicity_defect() > 1e-9) fail("A", "coefficients are not omega-periodic");
    if (sys.B.periodicity_defect() > 1e-9) fail("B", "coefficients are not omega-periodic");
  }
  return sys;
}

SystemSpec load_system_file(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_system(buf.str(), options);
}

}  // namespace floquet
