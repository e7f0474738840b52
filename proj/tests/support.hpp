#pragma once

// Brute-force oracles shared by the unit tests. Everything here is written from the
// defining sums, independent of the FFT-based library code.

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "otfs/grid_channel.hpp"
#include "otfs/rng.hpp"
#include "otfs/transforms.hpp"

namespace testing {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Arr = otfs::ComplexArray<double>;

inline cd expj(double phase) { return std::polar(1.0, phase); }

/// Unitary DFT matrix with entries e^{sign j2pi ab/n} / sqrt(n).
inline Mat dft_matrix(int n, int sign) {
  Mat f(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) f(a, b) = expj(sign * 2.0 * std::numbers::pi * a * b / n) / std::sqrt(double(n));
  return f;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// F_N (x) F_M^H in k*M + l ordering.
inline Mat sfft_matrix(int n, int m) { return kron(dft_matrix(n, -1), dft_matrix(m, +1)); }

inline Arr random_array(int rows, int cols, otfs::Engine& rng) {
  Arr a(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) a(r, c) = otfs::complex_gaussian(rng);
  return a;
}

inline Vec random_vector(int n, otfs::Engine& rng, double variance = 1.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = otfs::complex_gaussian(rng, variance);
  return v;
}

inline Vec flat(const Arr& a) {
  Vec v(a.size());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) v[r * a.cols() + c] = a(r, c);
  return v;
}

/// X[n,m] = (NM)^{-1/2} sum_{k,l} x[k,l] e^{j2pi(kn/N - ml/M)}
inline Arr brute_isfft(const Arr& x) {
  const int n = int(x.rows()), m = int(x.cols());
  Arr out = Arr::Zero(n, m);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < m; ++l)
          out(a, b) += x(k, l) * expj(2.0 * std::numbers::pi * (double(k) * a / n - double(b) * l / m));
  return out / std::sqrt(double(n * m));
}

/// x[k,l] = (NM)^{-1/2} sum_{n,m} X[n,m] e^{-j2pi(nk/N - ml/M)}
inline Arr brute_sfft(const Arr& x) {
  const int n = int(x.rows()), m = int(x.cols());
  Arr out = Arr::Zero(n, m);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < m; ++l)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b)
          out(k, l) += x(a, b) * expj(-2.0 * std::numbers::pi * (double(a) * k / n - double(b) * l / m));
  return out / std::sqrt(double(n * m));
}

/// y[k,l] = sum_p h_p x[(k - k_p)_N, (l - l_p)_M], evaluated literally.
inline Arr brute_channel(const otfs::ChannelRealization& h, const Arr& x) {
  const int n = int(x.rows()), m = int(x.cols());
  Arr y = Arr::Zero(n, m);
  const auto& taps = h.profile.taps();
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < m; ++l)
      for (std::size_t p = 0; p < taps.size(); ++p) {
        const int kk = ((k - taps[p].doppler) % n + n) % n;
        const int ll = ((l - taps[p].delay) % m + m) % m;
        y(k, l) += h.gains[p] * x(kk, ll);
      }
  return y;
}

inline otfs::ChannelRealization random_realization(const otfs::ChannelProfile& profile, std::uint64_t seed) {
  otfs::Engine rng(seed);
  return otfs::sample_realization(profile, rng);
}

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
