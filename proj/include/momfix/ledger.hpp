#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "transform.hpp"

namespace momfix {

enum class ledger_method { bisect_f, limit_formula, that_iteration };

inline const char* ledger_method_name(ledger_method m) {
  switch (m) {
    case ledger_method::bisect_f: return "bisect_f";
    case ledger_method::limit_formula: return "limit_formula";
    case ledger_method::that_iteration: return "that_iteration";
  }
  return "unknown";
}

inline ledger_method ledger_method_from(const std::string& s) {
  if (s == "bisect_f") return ledger_method::bisect_f;
  if (s == "limit_formula") return ledger_method::limit_formula;
  if (s == "that_iteration") return ledger_method::that_iteration;
  throw std::invalid_argument("ledger_method_from: unknown method '" + s + "'");
}

// One zero/weight pair of the spectrum, tagged with the method that found it.
struct ledger_entry {
  std::size_t k = 0;  // 1-based position within the shell, increasing xi
  double xi = 0.0;
  double rho = 0.0;
  double err = 0.0;  // combined position/weight error estimate
  ledger_method method = ledger_method::bisect_f;
};

// The zero/residue table of the Bernstein transform up to shell p_max.
struct spectrum_ledger {
  std::size_t p_max = 0;
  double rho0 = 0.0;
  double rho0_err = 0.0;  // not serialized; cross-method comparisons use it
  double tail_deficit = 0.0;
  std::vector<std::vector<ledger_entry>> shells;  // shells[p-1], xi increasing

  std::size_t atom_count() const {
    std::size_t c = 0;
    for (const auto& s : shells) c += s.size();
    return c;
  }
};

// Reinterpret a spectral measure as a ledger (uniform provenance and error).
inline spectrum_ledger to_ledger(const spectral_measure& mu, ledger_method method,
                                 double err) {
  spectrum_ledger led;
  led.p_max = mu.p_max();
  led.rho0 = mu.rho0;
  led.rho0_err = err;
  led.tail_deficit = mu.tail_deficit;
  led.shells.resize(mu.p_max());
  for (std::size_t p = 1; p <= mu.p_max(); ++p) {
    const auto& shell = mu.shells[p - 1];
    led.shells[p - 1].reserve(shell.size());
    for (std::size_t k = 1; k <= shell.size(); ++k)
      led.shells[p - 1].push_back(
          ledger_entry{k, shell[k - 1].xi, shell[k - 1].rho, err, method});
  }
  return led;
}

// Forget provenance: the measure carried by a ledger.
inline spectral_measure to_measure(const spectrum_ledger& led) {
  spectral_measure mu;
  mu.rho0 = led.rho0;
  mu.tail_deficit = led.tail_deficit;
  mu.shells.resize(led.shells.size());
  for (std::size_t p = 1; p <= led.shells.size(); ++p) {
    mu.shells[p - 1].reserve(led.shells[p - 1].size());
    for (const auto& e : led.shells[p - 1])
      mu.shells[p - 1].push_back(spectral_atom{e.xi, e.rho});
  }
  return mu;
}

}  // namespace momfix
