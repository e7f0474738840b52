#include "otfs/grid_channel.hpp"

#include <algorithm>
#include <string>

namespace otfs {

Grid::Grid(int n_doppler, int m_delay, double symbol_duration, double subcarrier_spacing)
    : n_(n_doppler), m_(m_delay), symbol_duration_(symbol_duration),
      subcarrier_spacing_(subcarrier_spacing) {
  if (n_ < 1 || m_ < 1) throw InvalidArgument("grid dimensions must be positive");
  if (!(symbol_duration_ > 0.0) || !(subcarrier_spacing_ > 0.0)) {
    throw InvalidArgument("symbol duration and subcarrier spacing must be positive");
  }
}

Grid make_grid(int n, int m, double delta_f) {
  if (!(delta_f > 0.0)) throw InvalidArgument("subcarrier spacing must be positive");
  return Grid(n, m, 1.0 / delta_f, delta_f);
}

ChannelProfile::ChannelProfile(std::vector<Tap> taps) : taps_(std::move(taps)) {
  if (taps_.empty()) throw InvalidArgument("channel profile needs at least one path");
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    if (taps_[i].delay < 0 || taps_[i].doppler < 0) {
      throw InvalidArgument("tap indices must be non-negative");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (taps_[i] == taps_[j]) {
        throw InvalidArgument("duplicate tap (" + std::to_string(taps_[i].delay) + ", " +
                              std::to_string(taps_[i].doppler) + ")");
      }
    }
  }
}

bool ChannelProfile::is_static() const noexcept {
  return std::all_of(taps_.begin(), taps_.end(), [](const Tap& t) { return t.doppler == 0; });
}

int ChannelProfile::max_delay() const noexcept {
  return std::max_element(taps_.begin(), taps_.end(),
                          [](const Tap& a, const Tap& b) { return a.delay < b.delay; })
      ->delay;
}

int ChannelProfile::max_doppler() const noexcept {
  return std::max_element(taps_.begin(), taps_.end(),
                          [](const Tap& a, const Tap& b) { return a.doppler < b.doppler; })
      ->doppler;
}

void ChannelProfile::check_fits(const Grid& grid) const {
  if (max_delay() >= grid.m()) {
    throw InvalidArgument("delay tap " + std::to_string(max_delay()) + " exceeds M-1 = " +
                          std::to_string(grid.m() - 1));
  }
  if (max_doppler() >= grid.n()) {
    throw InvalidArgument("Doppler tap " + std::to_string(max_doppler()) + " exceeds N-1 = " +
                          std::to_string(grid.n() - 1));
  }
}

ChannelProfile table1_profile() {
  return ChannelProfile({{2, 0}, {6, 0}, {10, 1}, {14, 1}});
}

ChannelProfile static_profile(int num_paths, std::span<const int> delay_taps) {
  if (num_paths < 1) throw InvalidArgument("static profile needs at least one path");
  if (static_cast<int>(delay_taps.size()) != num_paths) {
    throw InvalidArgument("expected " + std::to_string(num_paths) + " delay taps, got " +
                          std::to_string(delay_taps.size()));
  }
  std::vector<Tap> taps;
  taps.reserve(delay_taps.size());
  for (int d : delay_taps) taps.push_back({d, 0});
  return ChannelProfile(std::move(taps));
}

}  // namespace otfs
