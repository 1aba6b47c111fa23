#pragma once

#include <cstdlib>

namespace opeq {

/// Process-wide default tolerance scale for PSD verdicts, eigenvalue clamping
/// and related guards. Verdict tolerances are relative: tol_scale * max(1, |M|_2).
/// The OPEQ_TOL_SCALE environment variable overrides the default once at
/// startup; the value is read-only afterwards.
inline double default_tolerance_scale() {
  static const double value = [] {
    if (const char* env = std::getenv("OPEQ_TOL_SCALE")) {
      char* end = nullptr;
      const double parsed = std::strtod(env, &end);
      if (end != env && parsed > 0.0) return parsed;
    }
    return 1e-10;
  }();
  return value;
}

}  // namespace opeq
