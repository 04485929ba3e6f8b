#include "floquet/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace floquet {

namespace {

void write_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "null";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "\"inf\"" : "\"-inf\"";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  out += buf;
}

void write(std::string& out, const ordered_json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += ordered_json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // short numeric arrays (complex pairs, matrix rows) stay on one line
      const bool flat = std::all_of(v.begin(), v.end(), [](const ordered_json& e) { return e.is_primitive(); });
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case ordered_json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

}  // namespace

std::string dump_deterministic(const ordered_json& value, int indent) {
  std::string out;
  write(out, value, indent, 0);
  return out;
}

ordered_json to_json(const Complex& z) { return ordered_json::array({z.real(), z.imag()}); }

ordered_json to_json(const CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json to_json(const RMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json to_json(const HypothesisReport& report) {
  ordered_json j;
  j["norm"] = "matrix 1-norm";
  j["pass"] = report.pass;
  j["sigma"] = report.sigma;
  j["nu_plus"] = report.nu_plus;
  j["nu_minus"] = report.nu_minus;
  j["bounds"] = {{"inv_one_minus_nu_plus", report.bound_inv_plus},
                 {"one_plus_nu_minus", report.bound_minus},
                 {"inv_one_minus_nu_minus", report.bound_inv_minus},
                 {"one_plus_nu_plus", report.bound_plus}};
  ordered_json intervals = ordered_json::array();
  for (const auto& iv : report.intervals)
    intervals.push_back({{"sigma_plus", iv.sigma_plus},
                         {"sigma_minus", iv.sigma_minus},
                         {"nu_plus", iv.nu_plus},
                         {"nu_minus", iv.nu_minus}});
  j["intervals"] = std::move(intervals);
  return j;
}

ordered_json to_json(const std::vector<Residual>& residuals) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : residuals)
    rows.push_back({{"name", r.name}, {"value", r.value}, {"threshold", r.threshold}, {"pass", r.pass()}});
  return rows;
}

ordered_json to_json(const FloquetReport& report) {
  ordered_json j;
  j["omega"] = report.omega;
  j["monodromy"] = to_json(report.monodromy);
  ordered_json multipliers = ordered_json::array(), exponents = ordered_json::array(),
               lyapunov = ordered_json::array();
  for (const auto& rho : report.exponents.multipliers)
    multipliers.push_back({{"value", to_json(rho)}, {"modulus", std::abs(rho)}, {"arg", std::arg(rho)}});
  for (const auto& lambda : report.exponents.exponents) exponents.push_back(to_json(lambda));
  for (double l : report.exponents.lyapunov) lyapunov.push_back(l);
  j["multipliers"] = std::move(multipliers);
  j["exponents"] = std::move(exponents);
  j["lyapunov"] = std::move(lyapunov);
  j["verdict"] = report.verdict.to_string();
  j["oscillatory"] = report.exponents.oscillatory;
  j["hypothesis"] = to_json(report.hypothesis);
  j["residuals"] = to_json(report.residuals);
  j["P"] = report.P ? to_json(*report.P) : ordered_json(nullptr);
  j["P_real"] = report.P_real ? to_json(*report.P_real) : ordered_json(nullptr);
  return j;
}

}  // namespace floquet
