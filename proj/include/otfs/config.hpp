#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "otfs/equalizers.hpp"
#include "otfs/grid_channel.hpp"
#include "otfs/scheduling.hpp"

namespace otfs {

enum class Direction { Downlink, Uplink };
enum class RateMode { Fixed, Adaptive };

/// Which receivers a run evaluates. Skipping one only removes its metrics; the channel
/// draws of the others are unchanged.
enum class Receivers { All, U0, Noma };

struct ScenarioConfig {
  Direction direction = Direction::Downlink;
  int n = 16;
  int m = 16;
  int k = 16;
  double delta_f = 7500.0;
  ChannelProfile u0_profile = table1_profile();
  std::vector<int> noma_delay_taps{0, 1, 2, 3};
  double gamma0_sq = 0.75;
  double gamma1_sq = 0.25;
  double r0 = 0.5;
  double ri = 1.0;
  RateMode rate_mode = RateMode::Fixed;
  Equalizer equalizer = Equalizer::LE;
  Scheduler scheduler = Scheduler::Random;
  std::vector<double> snr_db{0, 5, 10, 15, 20, 25, 30};
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  Receivers receivers = Receivers::All;
  bool sic_genie = false;  ///< uplink fixed rate: force stage-I success

  Grid grid() const { return make_grid(n, m, delta_f); }
  ChannelProfile noma_profile() const;
  PowerAllocation power() const { return {gamma0_sq, gamma1_sq}; }

  /// Throws ConfigError naming the first inconsistent field.
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Every key is optional except
/// `direction`; unknown or repeated keys are errors. The result is validated.
ScenarioConfig parse_config(std::istream& in);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Accepts "a, b, c" or "start:step:stop" (inclusive of stop).
std::vector<double> parse_snr_grid(const std::string& text);

/// "delay:doppler, delay:doppler, ..."
ChannelProfile parse_profile(const std::string& text);

}  // namespace otfs
