#include "otfs/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "otfs/downlink.hpp"
#include "otfs/uplink.hpp"

namespace otfs {

namespace {

enum Metric {
  kU0Outage,
  kU0First,
  kU0Last,
  kOmaOutage,
  kOmaFirst,
  kOmaLast,
  kNomaOutage,
  kSumRateOma,
  kSumRateNoma,
  kErgodicGain,
  kMetricCount
};

constexpr std::array<const char*, kMetricCount> kMetricNames{
    "u0_outage",     "u0_outage_first",     "u0_outage_last", "u0_oma_outage",        "u0_oma_outage_first",
    "u0_oma_outage_last", "noma_outage", "outage_sum_rate_oma", "outage_sum_rate_noma", "ergodic_rate_gain"};

std::vector<Metric> active_metrics(const ScenarioConfig& c) {
  const bool u0 = c.receivers != Receivers::Noma;
  const bool noma = c.receivers != Receivers::U0;
  std::vector<Metric> out;
  if (c.direction == Direction::Uplink && c.rate_mode == RateMode::Adaptive) {
    if (u0) out.insert(out.end(), {kU0Outage, kU0First, kU0Last, kSumRateOma});
    if (noma) out.push_back(kErgodicGain);
    return out;
  }
  if (u0) out.insert(out.end(), {kU0Outage, kU0First, kU0Last, kOmaOutage, kOmaFirst, kOmaLast, kSumRateOma});
  if (noma) out.push_back(kNomaOutage);
  if (u0 && noma) out.push_back(kSumRateNoma);
  return out;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Evaluates one trial at every SNR point. One instance per worker (owns the sparse solver).
class TrialKernel {
 public:
  explicit TrialKernel(const ScenarioConfig& c)
      : c_(c), grid_(c.grid()), noma_profile_(c.noma_profile()), power_(c.power()),
        eps0_(rate_threshold(c.r0)), epsi_(rate_threshold(c.ri)) {
    for (double db : c.snr_db) rho_.push_back(db_to_linear(db));
    if (c.equalizer == Equalizer::DFE && needs_u0_stage()) engine_.emplace(c.u0_profile, grid_);
  }

  /// values[metric * S + s] for S SNR points.
  void run(std::uint64_t trial, std::vector<double>& values) {
    values.assign(static_cast<std::size_t>(kMetricCount) * rho_.size(), 0.0);
    if (c_.direction == Direction::Downlink) {
      downlink(trial, values);
    } else {
      uplink(trial, values);
    }
  }

 private:
  bool needs_u0_stage() const { return c_.receivers != Receivers::Noma; }

  double& at(std::vector<double>& v, Metric metric, std::size_t s) const { return v[metric * rho_.size() + s]; }

  struct U0State {
    double phi = 0.0;         // LE
    Eigen::VectorXd lambda;   // DFE
  };

  U0State draw_u0(std::uint64_t trial, ComplexArray<double>* tf_gains) {
    Engine rng = substream(c_.seed, trial, 0);
    const ChannelRealization h0 = sample_realization(c_.u0_profile, rng);
    U0State st;
    if (c_.equalizer == Equalizer::LE || tf_gains) {
      const auto d = diagonalize(BlockCirculantChannel<double>(grid_, h0));
      st.phi = d.phi();
      if (tf_gains) *tf_gains = time_frequency_gains(d);
    }
    if (engine_) st.lambda = engine_->pivots(h0);
    return st;
  }

  // Fraction of U_0 symbols in outage for the given interference power split, plus the flags
  // of x_0[0,0] and x_0[N-1,M-1].
  std::array<double, 3> u0_outage(const U0State& st, double rho, const PowerAllocation& p) const {
    if (c_.equalizer == Equalizer::LE) {
      const double sinr = std::isfinite(st.phi) ? noma_sinr(rho, p, st.phi) : 0.0;
      const double o = is_outage(sinr, eps0_) ? 1.0 : 0.0;
      return {o, o, o};
    }
    const Eigen::Index nm = st.lambda.size();
    auto flag = [&](Eigen::Index i) {
      const double lam = st.lambda[i];
      const double sinr = lam < kSingularThreshold ? 0.0 : noma_sinr(rho, p, 1.0 / lam);
      return is_outage(sinr, eps0_) ? 1.0 : 0.0;
    };
    double count = 0.0;
    for (Eigen::Index i = 0; i < nm; ++i) count += flag(i);
    return {count / static_cast<double>(nm), flag(0), flag(nm - 1)};
  }

  struct NomaUsers {
    std::vector<ChannelRealization> realizations;
    Eigen::MatrixXd gains_sq;  // K x M
    std::vector<int> schedule; // user per subchannel
  };

  NomaUsers draw_noma(std::uint64_t trial) {
    NomaUsers u;
    u.gains_sq.resize(c_.k, c_.m);
    u.realizations.reserve(c_.k);
    for (int i = 0; i < c_.k; ++i) {
      Engine rng = substream(c_.seed, trial, 1 + static_cast<std::uint64_t>(i));
      u.realizations.push_back(sample_realization(noma_profile_, rng));
      u.gains_sq.row(i) = nomauser_diagonalize<double>(u.realizations.back(), grid_).cwiseAbs2().transpose();
    }
    const UserPool pool(u.gains_sq);
    switch (c_.scheduler) {
      case Scheduler::Random: {
        Engine rng = substream(c_.seed, trial, 1 + static_cast<std::uint64_t>(c_.k));
        u.schedule = random_schedule(pool, rng);
        break;
      }
      case Scheduler::Greedy:
        u.schedule.assign(c_.m, greedy_schedule(pool));
        break;
      case Scheduler::PerSubchannel:
        u.schedule = per_subchannel_schedule(pool);
        break;
    }
    return u;
  }

  void downlink(std::uint64_t trial, std::vector<double>& v) {
    const std::size_t snrs = rho_.size();
    const bool want_u0 = c_.receivers != Receivers::Noma;
    const bool want_noma = c_.receivers != Receivers::U0;

    if (want_u0) {
      const U0State st = draw_u0(trial, nullptr);
      for (std::size_t s = 0; s < snrs; ++s) {
        const auto noma = u0_outage(st, rho_[s], power_);
        const auto oma = u0_outage(st, rho_[s], PowerAllocation::oma());
        at(v, kU0Outage, s) = noma[0];
        at(v, kU0First, s) = noma[1];
        at(v, kU0Last, s) = noma[2];
        at(v, kOmaOutage, s) = oma[0];
        at(v, kOmaFirst, s) = oma[1];
        at(v, kOmaLast, s) = oma[2];
        at(v, kSumRateOma, s) = (1.0 - oma[0]) * c_.r0;
      }
    }
    if (!want_noma) return;

    const NomaUsers users = draw_noma(trial);
    // Stage-I quantities only for the users actually scheduled.
    std::vector<std::optional<StaticChannel>> stage1(c_.k);
    for (int user : users.schedule) {
      if (!stage1[user]) {
        stage1[user] = make_static_channel(users.realizations[user], grid_, c_.equalizer == Equalizer::DFE);
      }
    }
    for (std::size_t s = 0; s < snrs; ++s) {
      const LinkConfig link(rho_[s], c_.r0, c_.ri);
      double failed = 0.0;
      for (int m = 0; m < c_.m; ++m) {
        const StaticChannel& ch = *stage1[users.schedule[m]];
        const Eigen::VectorXd sic = noma_stage1(ch, link, power_, c_.equalizer);
        const double snr2 = noma_stage2(ch, rho_[s], power_.gamma1_sq, m);
        failed += noma_outage(sic, snr2, link) ? 1.0 : 0.0;
      }
      const double noma = failed / c_.m;
      at(v, kNomaOutage, s) = noma;
      if (want_u0) at(v, kSumRateNoma, s) = (1.0 - at(v, kU0Outage, s)) * c_.r0 + (1.0 - noma) * c_.ri;
    }
  }

  void uplink(std::uint64_t trial, std::vector<double>& v) {
    const std::size_t snrs = rho_.size();
    const bool want_u0 = c_.receivers != Receivers::Noma;
    const bool want_noma = c_.receivers != Receivers::U0;
    const bool adaptive = c_.rate_mode == RateMode::Adaptive;
    const auto interference_free = PowerAllocation::oma();

    ComplexArray<double> h0_tf;
    const U0State st = draw_u0(trial, &h0_tf);
    const Eigen::ArrayXXd h0_sq = h0_tf.cwiseAbs2().array();
    const NomaUsers users = draw_noma(trial);
    const int n = c_.n, m_count = c_.m;
    const double cells = static_cast<double>(n) * m_count;

    for (std::size_t s = 0; s < snrs; ++s) {
      const double rho = rho_[s];
      double failed = 0.0, rate = 0.0;
      for (int m = 0; m < m_count; ++m) {
        const double gain = users.gains_sq(users.schedule[m], m);
        for (int k = 0; k < n; ++k) {
          const double sinr = rho * gain / (rho * h0_sq(k, m) + 1.0);
          if (adaptive) {
            rate += std::log2(1.0 + sinr);
          } else if (is_outage(sinr, epsi_)) {
            failed += 1.0;
          }
        }
      }
      if (adaptive) {
        if (want_noma) at(v, kErgodicGain, s) = rate / cells;
      } else if (want_noma) {
        at(v, kNomaOutage, s) = failed / cells;
      }
      if (!want_u0) continue;

      const auto stage2 = u0_outage(st, rho, interference_free);
      const bool sic_ok = adaptive || c_.sic_genie || failed == 0.0;
      const std::array<double, 3> joint =
          sic_ok ? stage2 : std::array<double, 3>{1.0, 1.0, 1.0};
      at(v, kU0Outage, s) = joint[0];
      at(v, kU0First, s) = joint[1];
      at(v, kU0Last, s) = joint[2];
      at(v, kOmaOutage, s) = stage2[0];
      at(v, kOmaFirst, s) = stage2[1];
      at(v, kOmaLast, s) = stage2[2];
      at(v, kSumRateOma, s) = (1.0 - stage2[0]) * c_.r0;
      if (!adaptive && want_noma) {
        at(v, kSumRateNoma, s) = (1.0 - joint[0]) * c_.r0 + (1.0 - failed / cells) * c_.ri;
      }
    }
  }

  const ScenarioConfig& c_;
  Grid grid_;
  ChannelProfile noma_profile_;
  PowerAllocation power_;
  double eps0_;
  double epsi_;
  std::vector<double> rho_;
  std::optional<DfePivotEngine> engine_;
};

struct BlockSums {
  std::vector<double> sum;
  std::vector<double> sumsq;
};

}  // namespace

std::vector<std::string> scenario_metrics(const ScenarioConfig& config) {
  std::vector<std::string> out;
  for (Metric m : active_metrics(config)) out.emplace_back(kMetricNames[m]);
  return out;
}

std::vector<CurvePoint> run_scenario(const ScenarioConfig& config, unsigned threads) {
  config.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<Metric> metrics = active_metrics(config);
  const std::size_t snrs = config.snr_db.size();
  const std::size_t width = static_cast<std::size_t>(kMetricCount) * snrs;
  const std::uint64_t blocks = (config.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  std::vector<BlockSums> partial(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      TrialKernel kernel(config);
      std::vector<double> values;
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        BlockSums acc{std::vector<double>(width, 0.0), std::vector<double>(width, 0.0)};
        const std::uint64_t end = std::min(config.trials, (b + 1) * kTrialsPerBlock);
        for (std::uint64_t t = b * kTrialsPerBlock; t < end; ++t) {
          kernel.run(t, values);
          for (std::size_t i = 0; i < width; ++i) {
            acc.sum[i] += values[i];
            acc.sumsq[i] += values[i] * values[i];
          }
        }
        partial[b] = std::move(acc);
      }
    } catch (...) {
      const std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };

  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<double> sum(width, 0.0), sumsq(width, 0.0);
  for (const auto& b : partial) {
    for (std::size_t i = 0; i < width; ++i) {
      sum[i] += b.sum[i];
      sumsq[i] += b.sumsq[i];
    }
  }

  const double n = static_cast<double>(config.trials);
  std::vector<CurvePoint> out;
  for (Metric metric : metrics) {
    for (std::size_t s = 0; s < snrs; ++s) {
      const std::size_t i = metric * snrs + s;
      const double mean = sum[i] / n;
      double ci = 0.0;
      if (config.trials > 1) {
        const double var = std::max(0.0, (sumsq[i] - sum[i] * mean) / (n - 1.0));
        ci = 1.96 * std::sqrt(var / n);
      }
      out.push_back({config.snr_db[s], kMetricNames[metric], mean, ci, config.trials});
    }
  }
  return out;
}

std::vector<CurvePoint> fixed_rate_outage_mc(ScenarioConfig config, unsigned threads) {
  if (config.direction != Direction::Uplink || config.rate_mode != RateMode::Fixed) {
    throw ConfigError("rate_mode", "fixed-rate uplink scenario required");
  }
  config.receivers = Receivers::Noma;
  return select_metric(run_scenario(config, threads), "noma_outage");
}

std::vector<CurvePoint> uplink_u0_outage(ScenarioConfig config, unsigned threads) {
  if (config.direction != Direction::Uplink) throw ConfigError("direction", "uplink scenario required");
  config.receivers = Receivers::U0;
  return select_metric(run_scenario(config, threads), "u0_outage");
}

}  // namespace otfs
