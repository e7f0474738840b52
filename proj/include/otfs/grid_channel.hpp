#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "otfs/errors.hpp"
#include "otfs/rng.hpp"

namespace otfs {

/// Sampling description shared by the time-frequency and delay-Doppler planes:
/// N symbols of duration T along time, M subcarriers spaced by Δf along frequency.
class Grid {
 public:
  Grid(int n_doppler, int m_delay, double symbol_duration, double subcarrier_spacing);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int size() const noexcept { return n_ * m_; }
  double symbol_duration() const noexcept { return symbol_duration_; }
  double subcarrier_spacing() const noexcept { return subcarrier_spacing_; }

  double frame_duration() const noexcept { return n_ * symbol_duration_; }
  double bandwidth() const noexcept { return m_ * subcarrier_spacing_; }
  /// 1 / (M Δf) seconds per delay tap.
  double delay_resolution() const noexcept { return 1.0 / bandwidth(); }
  /// 1 / (N T) hertz per Doppler tap.
  double doppler_resolution() const noexcept { return 1.0 / frame_duration(); }

  /// Row-major index k*M + l used for every NM-length vector in the library.
  int index(int k, int l) const noexcept { return k * m_ + l; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int n_;
  int m_;
  double symbol_duration_;
  double subcarrier_spacing_;
};

/// Grid with T = 1/Δf (critically sampled OFDM-style lattice).
Grid make_grid(int n, int m, double delta_f);

struct Tap {
  int delay = 0;    ///< l_tau, in units of 1/(M Δf)
  int doppler = 0;  ///< k_nu, in units of 1/(N T)

  friend bool operator==(const Tap&, const Tap&) = default;
};

/// Sparse delay-Doppler path set with integer taps (no fractional offsets).
class ChannelProfile {
 public:
  explicit ChannelProfile(std::vector<Tap> taps);

  const std::vector<Tap>& taps() const noexcept { return taps_; }
  int num_paths() const noexcept { return static_cast<int>(taps_.size()); }
  bool is_static() const noexcept;
  int max_delay() const noexcept;
  int max_doppler() const noexcept;

  /// Throws InvalidArgument if a tap falls outside [0, M-1] x [0, N-1].
  void check_fits(const Grid& grid) const;

  friend bool operator==(const ChannelProfile&, const ChannelProfile&) = default;

 private:
  std::vector<Tap> taps_;
};

/// Physical columns of the high-mobility reference profile. Kept for reference only:
/// the integer tap columns are authoritative (8.33 us at 120 kHz is about one tap, not two).
struct PhysicalPath {
  double delay_us;
  double doppler_hz;
};
inline constexpr std::array<PhysicalPath, 4> kHighMobilityPhysical{{
    {8.33, 0.0}, {25.0, 0.0}, {41.67, 468.8}, {58.33, 468.8}}};

/// Four-path profile of the high-mobility user: delay taps (2,6,10,14), Doppler taps (0,0,1,1).
ChannelProfile table1_profile();

/// Doppler-free profile for a low-mobility user.
ChannelProfile static_profile(int num_paths, std::span<const int> delay_taps);

struct ChannelRealization {
  ChannelProfile profile;
  Eigen::VectorXcd gains;  ///< h_p, one per path

  /// Sum of |h_p|^2.
  double total_power() const { return gains.squaredNorm(); }
};

/// Draws h_p ~ CN(0, 1/(P+1)) i.i.d., so E{sum |h_p|^2} = 1.
template <class Rng>
ChannelRealization sample_realization(const ChannelProfile& profile, Rng& rng) {
  const int paths = profile.num_paths();
  Eigen::VectorXcd gains(paths);
  const double variance = 1.0 / paths;
  for (int p = 0; p < paths; ++p) gains[p] = complex_gaussian(rng, variance);
  return {profile, std::move(gains)};
}

}  // namespace otfs
