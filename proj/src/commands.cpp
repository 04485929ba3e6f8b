#include "floquet/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>
#include <vector>

#include "floquet/error.hpp"
#include "floquet/floquet.hpp"
#include "floquet/log.hpp"
#include "floquet/model.hpp"
#include "floquet/report.hpp"
#include "floquet/simulate.hpp"

namespace floquet::cli {

namespace {

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}

void emit(const std::optional<std::string>& path, std::ostream& out, const std::string& text) {
  if (!path) {
    out << text;
    return;
  }
  std::ofstream file(*path, std::ios::binary);
  if (!file) throw InputError("out: cannot write " + *path);
  file << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

double parse_double(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v))
    throw InputError(what + ": invalid number '" + text + "'");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

Complex parse_complex(std::string text) {
  text = trim(text);
  if (text.empty()) throw InputError("x0: empty component");
  if (text.back() != 'i') return {parse_double(text, "x0"), 0.0};
  const std::string body = text.substr(0, text.size() - 1);
  // split at the last sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  const std::string re = split == std::string::npos ? "" : body.substr(0, split);
  std::string im = split == std::string::npos ? body : body.substr(split);
  if (im.empty() || im == "+") im = "1";
  if (im == "-") im = "-1";
  if (im.front() == '+') im.erase(0, 1);
  return {re.empty() ? 0.0 : parse_double(re, "x0"), parse_double(im, "x0")};
}

ordered_json records_json(const Trajectory& traj) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : traj.records) {
    ordered_json x = ordered_json::array();
    for (Eigen::Index i = 0; i < r.x.size(); ++i) x.push_back(to_json(r.x(i)));
    rows.push_back({{"t", r.t}, {"kind", to_string(r.kind)}, {"x", std::move(x)}});
  }
  return {{"method", traj.method}, {"records", std::move(rows)}};
}

}  // namespace

CVector parse_complex_list(const std::string& text) {
  std::vector<Complex> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(parse_complex(item));
  if (values.empty()) throw InputError("x0: no components given");
  CVector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

int cmd_analyze(const AnalyzeRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemSpec system = load_system_file(request.path);
    const FloquetReport report = analyze(system);
    emit(request.out, out, dump_deterministic(to_json(report)) + "\n");
    if (!report.hypothesis.pass && request.strict_h) return static_cast<int>(kHypothesisStrict);
    return static_cast<int>(kOk);
  });
}

int cmd_simulate(const SimulateRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (request.method != "cauchy" && request.method != "direct" && request.method != "both")
      throw InputError("method: expected cauchy, direct or both");
    const CVector x0 = parse_complex_list(request.x0);
    const SystemSpec system = load_system_file(request.path);
    const double dt = request.dt_out.value_or(system.omega / 20.0);

    std::vector<Trajectory> runs;
    if (request.method != "direct") runs.push_back(solve_cauchy(system, x0, request.t_end, dt));
    if (request.method != "cauchy") runs.push_back(solve_direct(system, x0, request.t_end, dt));

    std::string text;
    if (request.format == Format::Json) {
      ordered_json doc = ordered_json::array();
      for (const auto& r : runs) doc.push_back(records_json(r));
      text = dump_deterministic(doc) + "\n";
    } else if (runs.size() == 1) {
      text = trajectory_csv(runs.front());
    } else {
      for (const auto& r : runs) text += "# method=" + r.method + "\n" + trajectory_csv(r);
    }
    emit(request.out, out, text);
    if (runs.size() == 2) err << "max discrepancy: " << fmt(max_discrepancy(runs[0], runs[1])) << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_factorize(const FactorizeRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (request.samples < 1) throw InputError("samples: must be positive");
    const SystemSpec system = load_system_file(request.path);
    TransitionCache cache(system);
    CauchyPropagator propagator(cache);
    const CMatrix x = propagator.monodromy().cast<Complex>();
    const NormalForm form = request.real ? NormalForm::Real : NormalForm::Principal;
    const CMatrix P = request.real ? CMatrix(floquet_P_real(x, system.omega).cast<Complex>())
                                   : floquet_P(x, system.omega);
    const double period = (request.real ? 2.0 : 1.0) * system.omega;
    const auto residuals = verify_normal_form(propagator, P, std::min(request.samples, 32), form);

    std::vector<std::pair<double, CMatrix>> q;
    for (int i = 0; i < request.samples; ++i) {
      const double t = period * i / request.samples;
      q.emplace_back(t, q_factor(propagator, P, t));
    }

    std::string text;
    if (request.format == Format::Json) {
      ordered_json doc;
      doc["form"] = request.real ? "real" : "principal";
      doc["period"] = period;
      if (request.real)
        doc["P_real"] = to_json(RMatrix(P.real()));
      else
        doc["P"] = to_json(P);
      doc["residuals"] = to_json(residuals);
      ordered_json samples = ordered_json::array();
      for (const auto& [t, m] : q) samples.push_back({{"t", t}, {"Q", to_json(m)}});
      doc["samples"] = std::move(samples);
      text = dump_deterministic(doc) + "\n";
    } else {
      std::ostringstream os;
      os << "t";
      const Eigen::Index n = P.rows();
      for (Eigen::Index i = 1; i <= n; ++i)
        for (Eigen::Index j = 1; j <= n; ++j) os << ",re_q" << i << j << ",im_q" << i << j;
      os << '\n';
      for (const auto& [t, m] : q) {
        os << fmt(t);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < n; ++j) os << ',' << fmt(m(i, j).real()) << ',' << fmt(m(i, j).imag());
        os << '\n';
      }
      text = os.str();
    }
    emit(request.out, out, text);
    for (const auto& r : residuals)
      if (!r.pass()) err << "warning: residual " << r.name << " = " << fmt(r.value) << " exceeds " << fmt(r.threshold) << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const VerifyRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (request.samples < 1) throw InputError("samples: must be positive");
    LoadOptions options;
    options.enforce_periodicity = false;
    const SystemSpec system = load_system_file(request.path, options);
    TransitionCache cache(system);
    CauchyPropagator propagator(cache);
    const CMatrix x = propagator.monodromy().cast<Complex>();
    const CMatrix P = floquet_P(x, system.omega);
    auto residuals = verify_normal_form(propagator, P, request.samples);
    const auto structure = verify_structure(system, request.samples);
    residuals.insert(residuals.end(), structure.begin(), structure.end());

    bool pass = true;
    char line[160];
    std::snprintf(line, sizeof line, "%-22s %-20s %-20s %s\n", "residual", "value", "threshold", "status");
    err << line;
    for (const auto& r : residuals) {
      pass = pass && r.pass();
      std::snprintf(line, sizeof line, "%-22s %-20.6e %-20.6e %s\n", r.name.c_str(), r.value, r.threshold,
                    r.pass() ? "ok" : "FAIL");
      err << line;
    }
    ordered_json doc;
    doc["path"] = request.path;
    doc["pass"] = pass;
    doc["residuals"] = to_json(residuals);
    emit(request.out, out, dump_deterministic(doc) + "\n");
    return static_cast<int>(pass ? kOk : kVerificationFailed);
  });
}

int cmd_sweep(const SweepRequest& request, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (request.param.empty()) throw InputError("param: name required");
    const auto colon = request.range.find(':');
    if (colon == std::string::npos) throw InputError("range: expected lo:hi");
    const double lo = parse_double(trim(request.range.substr(0, colon)), "range");
    const double hi = parse_double(trim(request.range.substr(colon + 1)), "range");
    if (request.steps < 1) throw InputError("steps: must be at least 1");

    std::ifstream in(request.path, std::ios::binary);
    if (!in) throw InputError(request.path + ": cannot open file");
    const std::string tmpl((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string placeholder = "{" + request.param + "}";
    if (tmpl.find(placeholder) == std::string::npos)
      throw InputError("param: template has no placeholder " + placeholder);

    struct Row {
      double value;
      std::string verdict;
      bool oscillatory = false;
      std::vector<Complex> multipliers;
      std::vector<double> lyapunov;
    };
    const int steps = request.steps;
    std::vector<Row> rows(static_cast<std::size_t>(steps));
    std::vector<std::string> input_errors(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
      rows[static_cast<std::size_t>(i)].value = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);

    std::atomic<int> next{0};
    auto worker = [&] {
      for (int i = next++; i < steps; i = next++) {
        Row& row = rows[static_cast<std::size_t>(i)];
        char value[40];
        std::snprintf(value, sizeof value, "(%.17g)", row.value);
        std::string doc = tmpl;
        for (auto pos = doc.find(placeholder); pos != std::string::npos; pos = doc.find(placeholder, pos))
          doc.replace(pos, placeholder.size(), value);
        try {
          const SystemSpec system = load_system(doc);
          AnalyzeOptions options;
          options.residuals = false;
          const FloquetReport report = analyze(system, options);
          row.verdict = report.verdict.to_string();
          row.oscillatory = report.exponents.oscillatory;
          row.multipliers = report.exponents.multipliers;
          row.lyapunov = report.exponents.lyapunov;
        } catch (const InputError& e) {
          input_errors[static_cast<std::size_t>(i)] = e.what();
        } catch (const NumericalError& e) {
          row.verdict = "NumericalFailure";
          log_message(LogLevel::Warn, "sweep value " + fmt(row.value) + ": " + e.what());
        }
      }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned count = std::min<unsigned>(hw, static_cast<unsigned>(steps));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (int i = 0; i < steps; ++i)
      if (!input_errors[static_cast<std::size_t>(i)].empty())
        throw InputError(request.param + "=" + fmt(rows[static_cast<std::size_t>(i)].value) + ": " +
                         input_errors[static_cast<std::size_t>(i)]);

    std::size_t n = 0;
    for (const auto& r : rows) n = std::max(n, r.multipliers.size());
    std::string text;
    if (request.format == Format::Json) {
      ordered_json doc = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json mult = ordered_json::array(), lyap = ordered_json::array();
        for (const auto& m : r.multipliers) mult.push_back(to_json(m));
        for (double l : r.lyapunov) lyap.push_back(l);
        doc.push_back({{request.param, r.value},
                       {"verdict", r.verdict},
                       {"oscillatory", r.oscillatory},
                       {"multipliers", std::move(mult)},
                       {"lyapunov", std::move(lyap)}});
      }
      text = dump_deterministic(doc) + "\n";
    } else {
      std::ostringstream os;
      os << request.param << ",verdict,oscillatory";
      for (std::size_t j = 1; j <= n; ++j) os << ",re_rho" << j << ",im_rho" << j;
      for (std::size_t j = 1; j <= n; ++j) os << ",lyapunov" << j;
      os << '\n';
      for (const auto& r : rows) {
        os << fmt(r.value) << ',' << r.verdict << ',' << (r.oscillatory ? "true" : "false");
        for (std::size_t j = 0; j < n; ++j) {
          if (j < r.multipliers.size())
            os << ',' << fmt(r.multipliers[j].real()) << ',' << fmt(r.multipliers[j].imag());
          else
            os << ",nan,nan";
        }
        for (std::size_t j = 0; j < n; ++j) os << ',' << (j < r.lyapunov.size() ? fmt(r.lyapunov[j]) : "nan");
        os << '\n';
      }
      text = os.str();
    }
    emit(request.out, out, text);
    return static_cast<int>(kOk);
  });
}

}  // namespace floquet::cli
