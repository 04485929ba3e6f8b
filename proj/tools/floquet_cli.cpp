#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "floquet/commands.hpp"

namespace fc = floquet::cli;

namespace {

std::optional<fc::Format> parse_format(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return text == "csv" ? fc::Format::Csv : fc::Format::Json;
}

void add_out(CLI::App* cmd, std::string& out) { cmd->add_option("--out", out, "Write the primary output to this file"); }

std::optional<std::string> opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet analysis of periodic linear impulsive systems with piecewise constant arguments"};
  app.require_subcommand(1);

  std::string path, out, format, x0, method = "cauchy", param, range;
  double t_end = 0.0, dt_out = 0.0;
  int samples = 0, steps = 0;
  bool real = false, strict_h = false;
  const auto formats = CLI::IsMember({"json", "csv"});

  auto* analyze = app.add_subcommand("analyze", "Monodromy, multipliers, exponents and stability verdict (JSON)");
  analyze->add_option("system", path, "System document")->required();
  analyze->add_flag("--strict-h", strict_h, "Exit with status 2 when hypothesis (H) fails");
  add_out(analyze, out);
  analyze->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* simulate = app.add_subcommand("simulate", "Trajectory x(t) = W(t,0) x0 as CSV");
  simulate->add_option("system", path, "System document")->required();
  simulate->add_option("--x0", x0, "Initial state, comma-separated a+bi values")->required();
  simulate->add_option("--t-end", t_end, "Final time")->required();
  simulate->add_option("--dt-out", dt_out, "Output spacing (default omega/20)");
  simulate->add_option("--method", method, "Solver")->check(CLI::IsMember({"cauchy", "direct", "both"}));
  add_out(simulate, out);
  simulate->add_option("--format", format, "Output format")->check(formats);

  auto* factorize = app.add_subcommand("factorize", "Floquet normal form X(t) = Q(t) exp(P t)");
  factorize->add_option("system", path, "System document")->required();
  factorize->add_option("--samples", samples, "Number of Q(t) samples over one period");
  factorize->add_flag("--real", real, "Real generator of period 2 omega");
  add_out(factorize, out);
  factorize->add_option("--format", format, "Output format")->check(formats);

  auto* verify = app.add_subcommand("verify", "Structural residual checks; exit 4 on any breach");
  verify->add_option("system", path, "System document")->required();
  verify->add_option("--samples", samples, "Number of sample times");
  add_out(verify, out);
  verify->add_option("--format", format, "Output format")->check(CLI::IsMember({"json"}));

  auto* sweep = app.add_subcommand("sweep", "Parameter sweep over a system template");
  sweep->add_option("template", path, "Template document with {NAME} placeholders")->required();
  sweep->add_option("--param", param, "Placeholder name")->required();
  sweep->add_option("--range", range, "lo:hi")->required();
  sweep->add_option("--steps", steps, "Number of values, endpoints included")->required();
  add_out(sweep, out);
  sweep->add_option("--format", format, "Output format")->check(formats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return fc::kInputError;
  }

  if (analyze->parsed()) return fc::cmd_analyze({path, strict_h, opt(out)}, std::cout, std::cerr);
  if (simulate->parsed()) {
    fc::SimulateRequest req{path, x0, t_end, std::nullopt, method, opt(out), parse_format(format).value_or(fc::Format::Csv)};
    if (simulate->count("--dt-out")) req.dt_out = dt_out;
    return fc::cmd_simulate(req, std::cout, std::cerr);
  }
  if (factorize->parsed()) {
    fc::FactorizeRequest req{path, samples ? samples : 32, real, opt(out), parse_format(format).value_or(fc::Format::Json)};
    if (factorize->count("--samples")) req.samples = samples;
    return fc::cmd_factorize(req, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    fc::VerifyRequest req{path, 16, opt(out)};
    if (verify->count("--samples")) req.samples = samples;
    return fc::cmd_verify(req, std::cout, std::cerr);
  }
  fc::SweepRequest req{path, param, range, steps, opt(out), parse_format(format).value_or(fc::Format::Csv)};
  return fc::cmd_sweep(req, std::cout, std::cerr);
}
