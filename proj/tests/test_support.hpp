#pragma once

#include <cstdio>
#include <string>

#include "floquet/model.hpp"

namespace floquet::testing {

inline std::string data_path(const std::string& name) { return std::string(FLOQUET_DATA_DIR) + "/" + name + ".json"; }

inline std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline SystemSpec bundled(const std::string& name) { return load_system_file(data_path(name)); }

/// One-dimensional system on the unit floor grid with the given coefficient texts.
inline SystemSpec scalar_system(const std::string& a, const std::string& b, double c, double zeta = 0.0,
                                double omega = 1.0) {
  const std::string w = exact(omega);
  return load_system(R"({"n": 1, "omega": )" + w + R"(, "p": 1, "times": [0, )" + w + R"(], "args": [)" +
                     exact(zeta) + R"(], "A": [[")" + a + R"("]], "B": [[")" + b + R"("]], "impulses": [[[)" +
                     exact(c) + "]]]}");
}

}  // namespace floquet::testing
