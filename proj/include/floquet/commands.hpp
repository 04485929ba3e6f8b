#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "floquet/types.hpp"

namespace floquet::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kHypothesisStrict = 2,
  kNumericalError = 3,
  kVerificationFailed = 4,
};

enum class Format { Json, Csv };

struct AnalyzeRequest {
  std::string path;
  bool strict_h = false;
  std::optional<std::string> out;
};

struct SimulateRequest {
  std::string path;
  std::string x0;  // comma-separated a+bi list
  double t_end = 0.0;
  std::optional<double> dt_out;  // default omega / 20
  std::string method = "cauchy";  // cauchy | direct | both
  std::optional<std::string> out;
  Format format = Format::Csv;
};

struct FactorizeRequest {
  std::string path;
  int samples = 32;
  bool real = false;
  std::optional<std::string> out;
  Format format = Format::Json;
};

struct VerifyRequest {
  std::string path;
  int samples = 16;
  std::optional<std::string> out;
};

struct SweepRequest {
  std::string path;
  std::string param;
  std::string range;  // lo:hi
  int steps = 0;
  std::optional<std::string> out;
  Format format = Format::Csv;
};

/// Each command writes its primary output to `out` (or the request's file)
/// and diagnostics to `err`, and returns the process exit code. Library
/// exceptions are mapped to exit codes, never propagated.
int cmd_analyze(const AnalyzeRequest& request, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateRequest& request, std::ostream& out, std::ostream& err);
int cmd_factorize(const FactorizeRequest& request, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyRequest& request, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepRequest& request, std::ostream& out, std::ostream& err);

/// Parses "1+2i,-0.5,3i" into a complex vector. Throws InputError.
CVector parse_complex_list(const std::string& text);

}  // namespace floquet::cli
