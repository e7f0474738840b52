#include "otfs/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace otfs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

template <typename T>
T number(const std::string& field, const std::string& text) {
  T v{};
  if (!parse_number(text, v)) throw ConfigError(field, "cannot parse '" + text + "' as a number");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ConfigError(field, "value must be finite");
  }
  return v;
}

template <typename E>
E choice(const std::string& field, const std::string& text, const std::map<std::string, E>& options) {
  const auto it = options.find(text);
  if (it != options.end()) return it->second;
  std::string allowed;
  for (const auto& [name, _] : options) allowed += (allowed.empty() ? "" : "|") + name;
  throw ConfigError(field, "expected one of " + allowed + ", got '" + text + "'");
}

}  // namespace

std::vector<double> parse_snr_grid(const std::string& text) {
  const std::string t = trim(text);
  std::vector<double> out;
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("snr_db", "range must be start:step:stop");
    const double start = number<double>("snr_db", parts[0]);
    const double step = number<double>("snr_db", parts[1]);
    const double stop = number<double>("snr_db", parts[2]);
    if (!(step > 0.0)) throw ConfigError("snr_db", "range step must be positive");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count < 1) throw ConfigError("snr_db", "empty range");
    for (long i = 0; i < count; ++i) out.push_back(start + step * static_cast<double>(i));
  } else {
    for (const auto& item : split(t, ',')) out.push_back(number<double>("snr_db", item));
  }
  return out;
}

ChannelProfile parse_profile(const std::string& text) {
  std::vector<Tap> taps;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw ConfigError("u0_profile", "expected delay:doppler pairs, got '" + item + "'");
    taps.push_back({number<int>("u0_profile", parts[0]), number<int>("u0_profile", parts[1])});
  }
  try {
    return ChannelProfile(std::move(taps));
  } catch (const InvalidArgument& e) {
    throw ConfigError("u0_profile", e.what());
  }
}

ChannelProfile ScenarioConfig::noma_profile() const {
  return static_profile(static_cast<int>(noma_delay_taps.size()), noma_delay_taps);
}

void ScenarioConfig::validate() const {
  if (n < 1) throw ConfigError("n", "must be at least 1");
  if (m < 1) throw ConfigError("m", "must be at least 1");
  if (k < 1) throw ConfigError("k", "must be at least 1");
  if (!(delta_f > 0.0)) throw ConfigError("delta_f", "must be positive");
  try {
    u0_profile.check_fits(grid());
  } catch (const InvalidArgument& e) {
    throw ConfigError("u0_profile", e.what());
  }
  if (noma_delay_taps.empty()) throw ConfigError("noma_delay_taps", "needs at least one tap");
  try {
    noma_profile().check_fits(grid());
  } catch (const InvalidArgument& e) {
    throw ConfigError("noma_delay_taps", e.what());
  }
  if (!(gamma0_sq > 0.0 && gamma0_sq < 1.0)) throw ConfigError("gamma0_sq", "must lie in (0, 1)");
  if (!(gamma1_sq > 0.0 && gamma1_sq < 1.0)) throw ConfigError("gamma1_sq", "must lie in (0, 1)");
  if (std::abs(gamma0_sq + gamma1_sq - 1.0) > 1e-12) throw ConfigError("gamma1_sq", "gamma0_sq + gamma1_sq must equal 1");
  if (!(r0 > 0.0)) throw ConfigError("r0", "must be positive");
  if (!(ri > 0.0)) throw ConfigError("ri", "must be positive");
  if (rate_mode == RateMode::Adaptive && direction != Direction::Uplink) {
    throw ConfigError("rate_mode", "adaptive rates exist only in the uplink");
  }
  if (scheduler == Scheduler::Random && k < m) throw ConfigError("k", "random scheduling needs k >= m");
  if (snr_db.empty()) throw ConfigError("snr_db", "must not be empty");
  for (std::size_t i = 1; i < snr_db.size(); ++i) {
    if (!(snr_db[i] > snr_db[i - 1])) throw ConfigError("snr_db", "must be strictly increasing");
  }
  if (trials < 1) throw ConfigError("trials", "must be at least 1");
  if (sic_genie && !(direction == Direction::Uplink && rate_mode == RateMode::Fixed)) {
    throw ConfigError("sic_genie", "only meaningful for fixed-rate uplink");
  }
}

ScenarioConfig parse_config(std::istream& in) {
  ScenarioConfig c;
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters{
      {"direction", [&](const std::string& v) {
         c.direction = choice<Direction>("direction", v, {{"downlink", Direction::Downlink}, {"uplink", Direction::Uplink}});
       }},
      {"n", [&](const std::string& v) { c.n = number<int>("n", v); }},
      {"m", [&](const std::string& v) { c.m = number<int>("m", v); }},
      {"k", [&](const std::string& v) { c.k = number<int>("k", v); }},
      {"delta_f", [&](const std::string& v) { c.delta_f = number<double>("delta_f", v); }},
      {"u0_profile", [&](const std::string& v) { c.u0_profile = parse_profile(v); }},
      {"noma_delay_taps", [&](const std::string& v) {
         c.noma_delay_taps.clear();
         for (const auto& item : split(v, ',')) c.noma_delay_taps.push_back(number<int>("noma_delay_taps", item));
       }},
      {"gamma0_sq", [&](const std::string& v) { c.gamma0_sq = number<double>("gamma0_sq", v); }},
      {"gamma1_sq", [&](const std::string& v) { c.gamma1_sq = number<double>("gamma1_sq", v); }},
      {"r0", [&](const std::string& v) { c.r0 = number<double>("r0", v); }},
      {"ri", [&](const std::string& v) { c.ri = number<double>("ri", v); }},
      {"rate_mode", [&](const std::string& v) {
         c.rate_mode = choice<RateMode>("rate_mode", v, {{"fixed", RateMode::Fixed}, {"adaptive", RateMode::Adaptive}});
       }},
      {"equalizer", [&](const std::string& v) {
         c.equalizer = choice<Equalizer>("equalizer", v, {{"le", Equalizer::LE}, {"dfe", Equalizer::DFE}});
       }},
      {"scheduler", [&](const std::string& v) {
         c.scheduler = choice<Scheduler>("scheduler", v,
                                         {{"random", Scheduler::Random},
                                          {"greedy", Scheduler::Greedy},
                                          {"per_subchannel", Scheduler::PerSubchannel}});
       }},
      {"snr_db", [&](const std::string& v) { c.snr_db = parse_snr_grid(v); }},
      {"trials", [&](const std::string& v) { c.trials = number<std::uint64_t>("trials", v); }},
      {"seed", [&](const std::string& v) { c.seed = number<std::uint64_t>("seed", v); }},
      {"receivers", [&](const std::string& v) {
         c.receivers = choice<Receivers>("receivers", v, {{"all", Receivers::All}, {"u0", Receivers::U0}, {"noma", Receivers::Noma}});
       }},
      {"sic_genie", [&](const std::string& v) {
         c.sic_genie = choice<bool>("sic_genie", v, {{"true", true}, {"false", false}});
       }},
  };

  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(value);
  }
  if (!seen.count("direction")) throw ConfigError("direction", "required");
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in);
}

}  // namespace otfs
