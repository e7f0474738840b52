#include "otfs/equalizers.hpp"

#include <algorithm>

namespace otfs {

// Gram matrix A = H^H H has A[a, b] = sum over path pairs (p, q) with b = a + tap_p - tap_q of
// conj(h_p) h_q. It is stored with reversed indices (r(a) = NM-1-a) so that a plain
// top-down LDL of the stored matrix yields the pivots of A = L^H Lambda L.
DfePivotEngine::DfePivotEngine(const ChannelProfile& profile, const Grid& grid)
    : grid_(grid), profile_(profile) {
  profile_.check_fits(grid_);
  const int n = grid_.n(), m = grid_.m(), nm = grid_.size();
  const auto& taps = profile_.taps();
  const int paths = profile_.num_paths();

  struct Entry {
    int row, col, p, q;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(nm) * paths * paths);
  std::vector<Eigen::Triplet<std::complex<double>>> triplets;
  triplets.reserve(entries.capacity());
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < m; ++l) {
      const int a = grid_.index(k, l);
      for (int p = 0; p < paths; ++p) {
        for (int q = 0; q < paths; ++q) {
          const int kb = ((k + taps[p].doppler - taps[q].doppler) % n + n) % n;
          const int lb = ((l + taps[p].delay - taps[q].delay) % m + m) % m;
          const int b = grid_.index(kb, lb);
          if (a > b) continue;  // upper triangle of A is the lower triangle once reversed
          entries.push_back({nm - 1 - a, nm - 1 - b, p, q});
          triplets.emplace_back(nm - 1 - a, nm - 1 - b, 1.0);
        }
      }
    }
  }
  gram_.resize(nm, nm);
  gram_.setFromTriplets(triplets.begin(), triplets.end());
  gram_.makeCompressed();

  slots_.reserve(entries.size());
  const int* outer = gram_.outerIndexPtr();
  const int* inner = gram_.innerIndexPtr();
  for (const Entry& e : entries) {
    const int* first = inner + outer[e.col];
    const int* last = inner + outer[e.col + 1];
    const int* it = std::lower_bound(first, last, e.row);
    slots_.push_back({static_cast<int>(it - inner), e.p, e.q});
  }
  solver_.analyzePattern(gram_);
}

Eigen::VectorXd DfePivotEngine::pivots(const ChannelRealization& realization) {
  if (!(realization.profile == profile_)) throw InvalidArgument("realization profile differs from engine profile");
  const int nm = grid_.size();
  std::complex<double>* values = gram_.valuePtr();
  std::fill(values, values + gram_.nonZeros(), std::complex<double>(0.0));
  const Eigen::VectorXcd& h = realization.gains;
  for (const Slot& s : slots_) values[s.value_index] += std::conj(h[s.p]) * h[s.q];

  solver_.factorize(gram_);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(nm);
  if (solver_.info() != Eigen::Success) return out;
  const auto d = solver_.vectorD();
  for (int a = 0; a < nm; ++a) out[a] = std::max(0.0, d[nm - 1 - a].real());
  return out;
}

StaticChannel make_static_channel(const ChannelRealization& realization, const Grid& grid, bool with_pivots) {
  StaticChannel out;
  out.diag = nomauser_diagonalize<double>(realization, grid);
  if (!with_pivots) return out;

  const int m = grid.m();
  Eigen::MatrixXcd a0 = Eigen::MatrixXcd::Zero(m, m);
  const auto& taps = realization.profile.taps();
  for (std::size_t p = 0; p < taps.size(); ++p) {
    for (int l = 0; l < m; ++l) a0(l, (l - taps[p].delay + m) % m) += realization.gains[p];
  }
  const Eigen::MatrixXcd gram = a0.adjoint() * a0;
  try {
    out.pivots = detail::reverse_ldl(gram, false).lambda;
  } catch (const SingularChannel&) {
    out.pivots = Eigen::VectorXd::Zero(m);
  }
  return out;
}

}  // namespace otfs
