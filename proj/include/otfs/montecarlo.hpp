#pragma once

#include <string>
#include <vector>

#include "otfs/config.hpp"
#include "otfs/curves.hpp"

namespace otfs {

/// Trials are processed in fixed blocks of this many; block partial sums are merged in
/// block order, so the result does not depend on how blocks are spread over workers.
inline constexpr std::uint64_t kTrialsPerBlock = 4096;

/// Metric names a scenario reports, in output order.
std::vector<std::string> scenario_metrics(const ScenarioConfig& config);

/// Runs every trial of the scenario at every SNR point (channel draws of a trial are shared
/// across SNR points). Deterministic in (config, seed) for any `threads` >= 1; 0 picks the
/// hardware concurrency.
std::vector<CurvePoint> run_scenario(const ScenarioConfig& config, unsigned threads = 1);

/// Fixed-rate uplink: Monte Carlo outage of the scheduled NOMA users (metric noma_outage).
std::vector<CurvePoint> fixed_rate_outage_mc(ScenarioConfig config, unsigned threads = 1);

/// Fixed-rate uplink: U_0 outage including stage-I failures (metric u0_outage).
std::vector<CurvePoint> uplink_u0_outage(ScenarioConfig config, unsigned threads = 1);

}  // namespace otfs
