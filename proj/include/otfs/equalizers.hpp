#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "otfs/errors.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

enum class Equalizer { LE, DFE };

inline const char* to_string(Equalizer e) { return e == Equalizer::LE ? "le" : "dfe"; }

/// Magnitudes (|D| or lambda) below this mark a symbol as lost rather than aborting a run.
inline constexpr double kSingularThreshold = 1e-12;

/// NOMA power split: gamma0^2 to the high-mobility user, gamma1^2 to every NOMA user.
/// Under the interleaved subchannel mapping the budget reduces to gamma0^2 + gamma1^2 = 1.
struct PowerAllocation {
  double gamma0_sq;
  double gamma1_sq;

  PowerAllocation(double g0_sq, double g1_sq) : gamma0_sq(g0_sq), gamma1_sq(g1_sq) {
    if (!(g0_sq > 0.0 && g0_sq < 1.0) || !(g1_sq > 0.0 && g1_sq < 1.0)) {
      throw InvalidArgument("power coefficients must lie in (0, 1)");
    }
    if (std::abs(g0_sq + g1_sq - 1.0) > 1e-12) {
      throw InvalidArgument("power coefficients must sum to one");
    }
  }

  /// The high-mobility user alone on the whole grid (gamma0^2 = 1, no NOMA users).
  static PowerAllocation oma() { return PowerAllocation(Unchecked{}, 1.0, 0.0); }

  double gamma0() const { return std::sqrt(gamma0_sq); }
  double gamma1() const { return std::sqrt(gamma1_sq); }

 private:
  struct Unchecked {};
  PowerAllocation(Unchecked, double g0, double g1) : gamma0_sq(g0), gamma1_sq(g1) {}
};

/// SINR of a unit-gain stream with effective noise variance `noise` at transmit SNR rho.
inline double noma_sinr(double rho, const PowerAllocation& p, double noise) {
  return rho * p.gamma0_sq / (rho * p.gamma1_sq + noise);
}

// ---------------------------------------------------------------------------------------
// Reverse-ordered LDL: A = L^H Lambda L with L unit lower triangular.
// ---------------------------------------------------------------------------------------

/// Factors of H^H H = L^H Lambda L. Symbol k*M + l sees effective gain lambda[k*M + l].
template <typename Real>
struct DfeFactors {
  ComplexMatrix<Real> l_factor;
  RealVector<Real> lambda;
};

namespace detail {

/// Reverse LDL of a Hermitian positive definite matrix. Pivot j equals
/// 1 / [(A_{j:n, j:n})^{-1}]_{11}: the last pivot is A(n,n), the first 1/(A^{-1})_{11}.
template <typename Derived>
auto reverse_ldl(const Eigen::MatrixBase<Derived>& a, bool want_factor) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Matrix reversed = a.reverse();
  Eigen::LLT<Matrix, Eigen::Lower> llt(reversed);
  if (llt.info() != Eigen::Success) throw SingularChannel("Gram matrix is not positive definite");
  const Matrix g = llt.matrixL();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> diag = g.diagonal();

  DfeFactors<Real> out;
  out.lambda = diag.cwiseAbs2().reverse();
  if (want_factor) {
    const Matrix unit = g * diag.cwiseInverse().asDiagonal();
    out.l_factor = unit.reverse().adjoint();
  }
  return out;
}

}  // namespace detail

/// Dense Cholesky-type factorization H^H H = L^H Lambda L of the full channel.
template <typename Real>
DfeFactors<Real> cholesky_factors(const BlockCirculantChannel<Real>& channel) {
  const ComplexMatrix<Real> h = channel.dense();
  const ComplexMatrix<Real> gram = h.adjoint() * h;
  DfeFactors<Real> f = detail::reverse_ldl(gram, true);
  if (f.lambda.minCoeff() < Real(kSingularThreshold)) throw SingularChannel("rank-deficient channel");
  return f;
}

/// Per-symbol DFE pivots for many realizations of one profile. The Gram matrix pattern is
/// analysed once; each call only refactorizes numerically (sparse LDL, natural order).
class DfePivotEngine {
 public:
  DfePivotEngine(const ChannelProfile& profile, const Grid& grid);

  /// lambda in k*M + l order. Pivots that collapse numerically come back as 0.
  Eigen::VectorXd pivots(const ChannelRealization& realization);

  const Grid& grid() const noexcept { return grid_; }

 private:
  struct Slot {
    int value_index;
    int p;
    int q;
  };

  Grid grid_;
  ChannelProfile profile_;
  Eigen::SparseMatrix<std::complex<double>> gram_;
  std::vector<Slot> slots_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<std::complex<double>>, Eigen::Lower,
                        Eigen::NaturalOrdering<int>> solver_;
};

// ---------------------------------------------------------------------------------------
// FD-LE
// ---------------------------------------------------------------------------------------

/// Zero-forcing in the transformed domain: ISFFT_op( D^{-1} SFFT_op(y) ).
template <typename Real>
Frame<Real> fd_le_equalize(const Frame<Real>& y, const DiagonalizedChannel<Real>& d) {
  if (y.domain != Domain::DelayDoppler) throw DomainMismatch("FD-LE operates on delay-Doppler frames");
  if (!(y.grid == d.grid)) throw InvalidArgument("frame and channel grids differ");
  if (d.min_abs() < Real(kSingularThreshold)) throw SingularChannel("zero in the channel spectrum");
  ComplexArray<Real> t = sfft_operator<Real>(y.values);
  t.array() /= d.d_values.array();
  return {y.grid, isfft_operator<Real>(std::move(t)), Domain::DelayDoppler};
}

/// Common SINR of every x_0[k,l] under FD-LE; 0 when the channel is singular.
template <typename Real>
double fd_le_sinr(const DiagonalizedChannel<Real>& d, double rho, const PowerAllocation& p) {
  const double phi = static_cast<double>(d.phi());
  if (!std::isfinite(phi)) return 0.0;
  return noma_sinr(rho, p, phi);
}

// ---------------------------------------------------------------------------------------
// FD-DFE
// ---------------------------------------------------------------------------------------

template <typename Real>
std::vector<std::complex<Real>> qpsk_alphabet() {
  const Real a = Real(1) / std::sqrt(Real(2));
  return {{a, a}, {-a, a}, {-a, -a}, {a, -a}};
}

template <typename Real>
struct DfeFeedback {
  enum class Mode { Genie, HardDecision };

  Mode mode = Mode::Genie;
  ComplexVector<Real> truth;                 ///< Genie: transmitted superposition, k*M + l order
  std::vector<std::complex<Real>> alphabet;  ///< HardDecision: candidate composite symbols

  static DfeFeedback genie(ComplexVector<Real> x) { return {Mode::Genie, std::move(x), {}}; }
  static DfeFeedback hard_decision(std::vector<std::complex<Real>> points = qpsk_alphabet<Real>()) {
    return {Mode::HardDecision, {}, std::move(points)};
  }
};

/// x_hat = L (H^H H)^{-1} H^H y - (L - I) x_check. The feedback term is strictly lower
/// triangular, so symbols are decided in increasing k*M + l order.
template <typename Real>
Frame<Real> fd_dfe_equalize(const Frame<Real>& y, const BlockCirculantChannel<Real>& channel,
                            const DfeFactors<Real>& factors, const DfeFeedback<Real>& feedback) {
  if (y.domain != Domain::DelayDoppler) throw DomainMismatch("FD-DFE operates on delay-Doppler frames");
  const int nm = channel.grid().size();
  const ComplexArray<Real> hy = channel.apply_adjoint(y.values);
  const Eigen::Map<const ComplexVector<Real>> hy_vec(hy.data(), nm);

  // L A^{-1} H^H y = Lambda^{-1} L^{-H} H^H y
  ComplexVector<Real> ff = factors.l_factor.adjoint().template triangularView<Eigen::UnitUpper>().solve(hy_vec);
  ff.array() /= factors.lambda.array().template cast<std::complex<Real>>();

  ComplexVector<Real> out(nm);
  if (feedback.mode == DfeFeedback<Real>::Mode::Genie) {
    if (feedback.truth.size() != nm) throw InvalidArgument("genie feedback needs the transmitted frame");
    out = ff - factors.l_factor.template triangularView<Eigen::StrictlyLower>() * feedback.truth;
  } else {
    if (feedback.alphabet.empty()) throw InvalidArgument("hard-decision feedback needs an alphabet");
    ComplexVector<Real> decided(nm);
    for (int j = 0; j < nm; ++j) {
      std::complex<Real> acc = ff[j];
      for (int i = 0; i < j; ++i) acc -= factors.l_factor(j, i) * decided[i];
      out[j] = acc;
      auto best = feedback.alphabet.front();
      for (const auto& s : feedback.alphabet) {
        if (std::norm(acc - s) < std::norm(acc - best)) best = s;
      }
      decided[j] = best;
    }
  }
  return frame_from_vec<Real>(channel.grid(), out, Domain::DelayDoppler);
}

template <typename Real>
Frame<Real> fd_dfe_equalize(const Frame<Real>& y, const BlockCirculantChannel<Real>& channel,
                            const DfeFeedback<Real>& feedback) {
  return fd_dfe_equalize(y, channel, cholesky_factors(channel), feedback);
}

/// SINR_kl = rho g0^2 / (rho g1^2 + 1/lambda_kl); a vanished pivot gives 0.
template <typename Derived>
Eigen::VectorXd fd_dfe_sinrs(const Eigen::MatrixBase<Derived>& lambda, double rho, const PowerAllocation& p) {
  Eigen::VectorXd out(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double lam = static_cast<double>(lambda[i]);
    out[i] = lam < kSingularThreshold ? 0.0 : noma_sinr(rho, p, 1.0 / lam);
  }
  return out;
}

template <typename Real>
Eigen::VectorXd fd_dfe_sinrs(const DfeFactors<Real>& factors, double rho, const PowerAllocation& p) {
  return fd_dfe_sinrs(factors.lambda, rho, p);
}

// ---------------------------------------------------------------------------------------
// Doppler-free (NOMA user) channels: everything reduces to the M x M circulant A_0.
// ---------------------------------------------------------------------------------------

struct StaticChannel {
  Eigen::VectorXcd diag;   ///< D~^l, l = 0..M-1
  Eigen::VectorXd pivots;  ///< lambda~_l from A_0^H A_0 = L^H Lambda L; empty unless requested

  double phi() const {
    if (diag.cwiseAbs().minCoeff() < kSingularThreshold) return std::numeric_limits<double>::infinity();
    return diag.cwiseAbs2().cwiseInverse().mean();
  }
};

StaticChannel make_static_channel(const ChannelRealization& realization, const Grid& grid, bool with_pivots);

/// M-point analogue of fd_dfe_sinrs on A_0.
inline Eigen::VectorXd static_dfe_sinrs(const StaticChannel& channel, double rho, const PowerAllocation& p) {
  if (channel.pivots.size() == 0) throw InvalidArgument("static channel was built without DFE pivots");
  return fd_dfe_sinrs(channel.pivots, rho, p);
}

}  // namespace otfs
