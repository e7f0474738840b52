#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include "otfs/errors.hpp"
#include "otfs/grid_channel.hpp"

namespace otfs {

enum class Domain { DelayDoppler, TimeFrequency };

inline const char* to_string(Domain d) {
  return d == Domain::DelayDoppler ? "delay-Doppler" : "time-frequency";
}

/// N x M array, row-major so that the flat index is k*M + l.
template <typename Real>
using ComplexArray = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Largest NM for which an NM x NM matrix is ever materialized.
inline constexpr int kDenseLimit = 4096;

template <typename Real>
struct Frame {
  Grid grid;
  ComplexArray<Real> values;
  Domain domain;

  /// Flat view in k*M + l order.
  Eigen::Map<ComplexVector<Real>> vec() { return {values.data(), values.size()}; }
  Eigen::Map<const ComplexVector<Real>> vec() const { return {values.data(), values.size()}; }
};

template <typename Real>
Frame<Real> make_frame(const Grid& grid, Domain domain) {
  return {grid, ComplexArray<Real>::Zero(grid.n(), grid.m()), domain};
}

template <typename Real>
Frame<Real> make_frame(const Grid& grid, ComplexArray<Real> values, Domain domain) {
  if (values.rows() != grid.n() || values.cols() != grid.m()) {
    throw InvalidArgument("frame shape " + std::to_string(values.rows()) + "x" +
                          std::to_string(values.cols()) + " does not match grid " +
                          std::to_string(grid.n()) + "x" + std::to_string(grid.m()));
  }
  return {grid, std::move(values), domain};
}

/// Frame built from a flat k*M + l vector.
template <typename Real, typename Derived>
Frame<Real> frame_from_vec(const Grid& grid, const Eigen::MatrixBase<Derived>& v, Domain domain) {
  if (v.size() != grid.size()) throw InvalidArgument("vector length does not match grid");
  Frame<Real> f = make_frame<Real>(grid, domain);
  f.vec() = v;
  return f;
}

namespace detail {

template <typename Real>
Eigen::FFT<Real>& fft_engine() {
  thread_local Eigen::FFT<Real> fft = [] {
    Eigen::FFT<Real> f;
    f.SetFlag(Eigen::FFT<Real>::Unscaled);
    return f;
  }();
  return fft;
}

/// In-place unnormalized DFT of every row (along the M axis); sign -1 means e^{-j2pi..}.
template <typename Real>
void dft_rows(ComplexArray<Real>& a, int sign) {
  const auto rows = a.rows(), cols = a.cols();
  if (cols < 2) return;
  auto& fft = fft_engine<Real>();
  std::vector<std::complex<Real>> in(cols), out;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) in[c] = a(r, c);
    if (sign < 0) fft.fwd(out, in); else fft.inv(out, in);
    for (Eigen::Index c = 0; c < cols; ++c) a(r, c) = out[c];
  }
}

/// In-place unnormalized DFT of every column (along the N axis).
template <typename Real>
void dft_cols(ComplexArray<Real>& a, int sign) {
  const auto rows = a.rows(), cols = a.cols();
  if (rows < 2) return;
  auto& fft = fft_engine<Real>();
  std::vector<std::complex<Real>> in(rows), out;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) in[r] = a(r, c);
    if (sign < 0) fft.fwd(out, in); else fft.inv(out, in);
    for (Eigen::Index r = 0; r < rows; ++r) a(r, c) = out[r];
  }
}

/// In-place unnormalized 2-D DFT. `col_sign` is the exponent sign along the N (row index)
/// axis and `row_sign` along the M (column index) axis.
template <typename Real>
void dft2(ComplexArray<Real>& a, int col_sign, int row_sign) {
  dft_rows(a, row_sign);
  dft_cols(a, col_sign);
}

}  // namespace detail

/// Applies F_N (x) F_M^H to a k*M + l ordered array (the SFFT operator, unitary).
template <typename Real>
ComplexArray<Real> sfft_operator(ComplexArray<Real> a) {
  detail::dft2(a, -1, +1);
  a /= std::sqrt(static_cast<Real>(a.size()));
  return a;
}

/// Applies F_N^H (x) F_M, the inverse of sfft_operator (the ISFFT operator).
template <typename Real>
ComplexArray<Real> isfft_operator(ComplexArray<Real> a) {
  detail::dft2(a, +1, -1);
  a /= std::sqrt(static_cast<Real>(a.size()));
  return a;
}

/// X[n,m] = (NM)^{-1/2} sum_{k,l} x[k,l] e^{j2pi(kn/N - ml/M)}.
template <typename Real>
Frame<Real> isfft(const Frame<Real>& frame) {
  if (frame.domain != Domain::DelayDoppler) {
    throw DomainMismatch(std::string("isfft expects a delay-Doppler frame, got ") +
                         to_string(frame.domain));
  }
  return {frame.grid, isfft_operator<Real>(frame.values), Domain::TimeFrequency};
}

/// x[k,l] = (NM)^{-1/2} sum_{n,m} X[n,m] e^{-j2pi(nk/N - ml/M)}.
template <typename Real>
Frame<Real> sfft(const Frame<Real>& frame) {
  if (frame.domain != Domain::TimeFrequency) {
    throw DomainMismatch(std::string("sfft expects a time-frequency frame, got ") +
                         to_string(frame.domain));
  }
  return {frame.grid, sfft_operator<Real>(frame.values), Domain::DelayDoppler};
}

/// Delay-Doppler channel matrix H: block (r, c) is A_{(r-c) mod N}, each A_n an M x M
/// circulant. Held as the sparse tap list; the dense matrix is only built on request.
template <typename Real>
class BlockCirculantChannel {
 public:
  BlockCirculantChannel(Grid grid, ChannelRealization realization)
      : grid_(grid), realization_(std::move(realization)) {
    realization_.profile.check_fits(grid_);
    if (realization_.gains.size() != realization_.profile.num_paths()) {
      throw InvalidArgument("gain count does not match path count");
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const ChannelRealization& realization() const noexcept { return realization_; }

  /// y[k,l] = sum_p h_p x[(k - k_p)_N, (l - l_p)_M].
  ComplexArray<Real> apply(const ComplexArray<Real>& x) const {
    const int n = grid_.n(), m = grid_.m();
    ComplexArray<Real> y = ComplexArray<Real>::Zero(n, m);
    const auto& taps = realization_.profile.taps();
    for (std::size_t p = 0; p < taps.size(); ++p) {
      const std::complex<Real> h(realization_.gains[p]);
      for (int k = 0; k < n; ++k) {
        const int ks = (k - taps[p].doppler + n) % n;
        for (int l = 0; l < m; ++l) y(k, l) += h * x(ks, (l - taps[p].delay + m) % m);
      }
    }
    return y;
  }

  /// H^H y.
  ComplexArray<Real> apply_adjoint(const ComplexArray<Real>& y) const {
    const int n = grid_.n(), m = grid_.m();
    ComplexArray<Real> x = ComplexArray<Real>::Zero(n, m);
    const auto& taps = realization_.profile.taps();
    for (std::size_t p = 0; p < taps.size(); ++p) {
      const std::complex<Real> hc = std::conj(std::complex<Real>(realization_.gains[p]));
      for (int k = 0; k < n; ++k) {
        const int ks = (k + taps[p].doppler) % n;
        for (int l = 0; l < m; ++l) x(k, l) += hc * y(ks, (l + taps[p].delay) % m);
      }
    }
    return x;
  }

  Frame<Real> apply(const Frame<Real>& x) const {
    if (x.domain != Domain::DelayDoppler) throw DomainMismatch("channel acts on delay-Doppler frames");
    return {grid_, apply(x.values), Domain::DelayDoppler};
  }

  /// Materialized NM x NM matrix, row and column index k*M + l.
  ComplexMatrix<Real> dense() const {
    const int n = grid_.n(), m = grid_.m(), nm = grid_.size();
    if (nm > kDenseLimit) throw InvalidArgument("NM too large for a dense channel matrix");
    ComplexMatrix<Real> h = ComplexMatrix<Real>::Zero(nm, nm);
    const auto& taps = realization_.profile.taps();
    for (std::size_t p = 0; p < taps.size(); ++p) {
      const std::complex<Real> g(realization_.gains[p]);
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < m; ++l) {
          const int src = grid_.index((k - taps[p].doppler + n) % n, (l - taps[p].delay + m) % m);
          h(grid_.index(k, l), src) += g;
        }
      }
    }
    return h;
  }

  /// A_n: the M x M block in block-row n, block-column 0.
  ComplexMatrix<Real> block(int n_index) const {
    const int n = grid_.n(), m = grid_.m();
    if (n_index < 0 || n_index >= n) throw InvalidArgument("block index out of range");
    ComplexMatrix<Real> a = ComplexMatrix<Real>::Zero(m, m);
    const auto& taps = realization_.profile.taps();
    for (std::size_t p = 0; p < taps.size(); ++p) {
      if (taps[p].doppler != n_index) continue;
      for (int l = 0; l < m; ++l) a(l, (l - taps[p].delay + m) % m) += std::complex<Real>(realization_.gains[p]);
    }
    return a;
  }

  /// First column of H as an N x M array (a_n^{m,1} at (n, m)).
  ComplexArray<Real> first_column() const {
    ComplexArray<Real> a = ComplexArray<Real>::Zero(grid_.n(), grid_.m());
    const auto& taps = realization_.profile.taps();
    for (std::size_t p = 0; p < taps.size(); ++p) {
      a(taps[p].doppler, taps[p].delay) += std::complex<Real>(realization_.gains[p]);
    }
    return a;
  }

 private:
  Grid grid_;
  ChannelRealization realization_;
};

template <typename Real = double>
BlockCirculantChannel<Real> build_block_circulant(const ChannelRealization& realization, const Grid& grid) {
  return BlockCirculantChannel<Real>(grid, realization);
}

/// Eigenvalues of H under the SFFT-operator similarity: D^{k,l} at (k, l).
template <typename Real>
struct DiagonalizedChannel {
  Grid grid;
  ComplexArray<Real> d_values;

  Eigen::Map<const ComplexVector<Real>> vec() const { return {d_values.data(), d_values.size()}; }

  Real min_abs() const { return d_values.cwiseAbs().minCoeff(); }

  /// (1/NM) sum |D^{k,l}|^{-2}; +inf if any |D| falls below `threshold`.
  Real phi(Real threshold = Real(1e-12)) const {
    if (min_abs() < threshold) return std::numeric_limits<Real>::infinity();
    return d_values.cwiseAbs2().cwiseInverse().mean();
  }
};

/// D^{k,l} = sum_{n,m} a_n^{m,1} e^{j2pi lm/M} e^{-j2pi kn/N}, evaluated with FFTs on the
/// first column of H.
template <typename Real>
DiagonalizedChannel<Real> diagonalize(const BlockCirculantChannel<Real>& channel) {
  ComplexArray<Real> a = channel.first_column();
  detail::dft2(a, -1, +1);
  return {channel.grid(), std::move(a)};
}

/// D~^l = sum_m a_0^{m,1} e^{j2pi lm/M} for a Doppler-free channel; equals every row of
/// the full diagonalization.
template <typename Real = double>
ComplexVector<Real> nomauser_diagonalize(const ChannelRealization& realization, const Grid& grid) {
  if (!realization.profile.is_static()) {
    throw InvalidArgument("NOMA-user diagonalization needs a Doppler-free channel");
  }
  realization.profile.check_fits(grid);
  const int m = grid.m();
  ComplexArray<Real> a = ComplexArray<Real>::Zero(1, m);
  const auto& taps = realization.profile.taps();
  for (std::size_t p = 0; p < taps.size(); ++p) a(0, taps[p].delay) += std::complex<Real>(realization.gains[p]);
  detail::dft2(a, +1, +1);
  return a.transpose();
}

}  // namespace otfs
