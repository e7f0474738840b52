#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "otfs/oracles.hpp"
#include "otfs/uplink.hpp"

namespace {

// "k=4,epsilon=1" or separate "k=4" "epsilon=1" arguments.
std::map<std::string, double> parse_params(const std::vector<std::string>& args) {
  std::map<std::string, double> out;
  for (const auto& arg : args) {
    std::istringstream in(arg);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("parameter '" + item + "' is not key=value");
      std::size_t used = 0;
      const std::string value = item.substr(eq + 1);
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad number in '" + item + "'");
      out[item.substr(0, eq)] = v;
    }
  }
  return out;
}

double get(const std::map<std::string, double>& p, const std::string& key) {
  const auto it = p.find(key);
  if (it == p.end()) throw std::invalid_argument("missing parameter '" + key + "'");
  return it->second;
}

int get_int(const std::map<std::string, double>& p, const std::string& key) {
  const double v = get(p, key);
  if (v != std::floor(v)) throw std::invalid_argument("parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

double get_rho(const std::map<std::string, double>& p) {
  if (p.count("rho") && p.count("rho_db")) throw std::invalid_argument("give rho or rho_db, not both");
  if (p.count("rho_db")) return std::pow(10.0, get(p, "rho_db") / 10.0);
  return get(p, "rho");
}

void require_only(const std::map<std::string, double>& p, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : p) {
    if (!allowed.count(key)) throw std::invalid_argument("unknown parameter '" + key + "'");
  }
}

void print(const char* name, double v) { std::printf("%s %.17g\n", name, v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form outage expressions"};
  std::string formula;
  std::vector<std::string> params;
  app.add_option("--formula", formula, "corollary1 | closedform | floor")
      ->required()
      ->check(CLI::IsMember({"corollary1", "closedform", "floor"}));
  app.add_option("--params", params,
                 "key=value list. corollary1: p0, rho|rho_db, gamma0_sq, gamma1_sq, r0; "
                 "closedform: k, epsilon, rho|rho_db; floor: k, epsilon");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto p = parse_params(params);
    if (formula == "corollary1") {
      require_only(p, {"p0", "rho", "rho_db", "gamma0_sq", "gamma1_sq", "r0"});
      print("outage", otfs::corollary1_outage(get_int(p, "p0"), get_rho(p), get(p, "gamma0_sq"),
                                              get(p, "gamma1_sq"), get(p, "r0")));
    } else if (formula == "closedform") {
      require_only(p, {"k", "epsilon", "rho", "rho_db"});
      print("outage", otfs::closed_form_outage(get_int(p, "k"), get(p, "epsilon"), get_rho(p)));
    } else {
      require_only(p, {"k", "epsilon"});
      const int k = get_int(p, "k");
      const double eps = get(p, "epsilon");
      print("floor", otfs::error_floor(k, eps));
      print("floor_approx", otfs::floor_approx(k, eps));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
