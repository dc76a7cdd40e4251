#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ledger.hpp"

namespace momfix {

inline constexpr const char* ledger_schema_id = "momfix-ledger/1";

inline nlohmann::json ledger_to_json(const spectrum_ledger& led) {
  nlohmann::json j;
  j["schema"] = ledger_schema_id;
  j["p_max"] = led.p_max;
  j["rho0"] = led.rho0;
  j["tail_deficit"] = led.tail_deficit;
  j["shells"] = nlohmann::json::array();
  for (std::size_t p = 1; p <= led.shells.size(); ++p) {
    nlohmann::json shell;
    shell["p"] = p;
    shell["atoms"] = nlohmann::json::array();
    for (const ledger_entry& e : led.shells[p - 1]) {
      shell["atoms"].push_back({{"k", e.k},
                                {"xi", e.xi},
                                {"rho", e.rho},
                                {"err", e.err},
                                {"method", ledger_method_name(e.method)}});
    }
    j["shells"].push_back(std::move(shell));
  }
  return j;
}

inline spectrum_ledger ledger_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", std::string{}) != ledger_schema_id)
    throw std::invalid_argument("ledger_from_json: unrecognized schema");
  spectrum_ledger led;
  led.p_max = j.at("p_max").get<std::size_t>();
  led.rho0 = j.at("rho0").get<double>();
  led.tail_deficit = j.at("tail_deficit").get<double>();
  led.shells.resize(led.p_max);
  for (const auto& shell : j.at("shells")) {
    std::size_t p = shell.at("p").get<std::size_t>();
    if (p < 1 || p > led.p_max)
      throw std::invalid_argument("ledger_from_json: shell index out of range");
    auto& out = led.shells[p - 1];
    for (const auto& atom : shell.at("atoms")) {
      out.push_back(ledger_entry{
          atom.at("k").get<std::size_t>(), atom.at("xi").get<double>(),
          atom.at("rho").get<double>(), atom.at("err").get<double>(),
          ledger_method_from(atom.at("method").get<std::string>())});
    }
  }
  return led;
}

inline void save_ledger(const spectrum_ledger& led, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_ledger: cannot open " + path);
  out << ledger_to_json(led).dump(2) << '\n';
  if (!out) throw std::runtime_error("save_ledger: write failed on " + path);
}

inline spectrum_ledger load_ledger(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_ledger: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return ledger_from_json(j);
}

}  // namespace momfix
