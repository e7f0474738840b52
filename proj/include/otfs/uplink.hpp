#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "otfs/equalizers.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

/// Base-station observation Y[n,m] = sum_q H_q[n,m] X_q[n,m] + W[n,m].
struct UplinkObservation {
  Grid grid;
  ComplexArray<double> y;                   ///< N x M time-frequency samples
  std::vector<ComplexArray<double>> h;      ///< per-transmitter N x M time-frequency gains, U_0 first
};

/// Time-frequency gains H[n,m] of a delay-Doppler channel under the SFFT/ISFFT pair used by
/// this library: H[n,m] = D^{(-n)_N, (-m)_M}.
ComplexArray<double> time_frequency_gains(const DiagonalizedChannel<double>& d);

/// Stage-I estimate of the symbol at cell (n, m) carried by transmitter q (one-tap, U_0 as noise).
std::complex<double> uplink_stage1_estimate(const UplinkObservation& obs, int q, int n, int m);

/// rho |h_i|^2 / (rho |h_0|^2 + 1).
double uplink_stage1_sinr(std::complex<double> h_i, std::complex<double> h_0, double rho);

/// log2(1 + stage-I SINR): the largest rate that keeps stage I error free.
double adaptive_rate(std::complex<double> h_i, std::complex<double> h_0, double rho);

/// P(max-of-K exponential gain fails against an exponential interferer):
/// sum_k C(K,k) (-1)^k e^{-k eps / rho} / (k eps + 1). Extended precision for K <= 20,
/// adaptive quadrature of the defining integral above that.
double closed_form_outage(int k_users, double epsilon, double rho);

/// rho -> infinity limit of closed_form_outage: sum_k C(K,k) (-1)^k / (k eps + 1).
double error_floor(int k_users, double epsilon);

/// K! eps^K, valid while K eps is small.
double floor_approx(int k_users, double epsilon);

/// Interference-free stage-II SINRs of U_0 (NM values): LE rho / phi, DFE rho lambda_kl.
Eigen::VectorXd uplink_stage2_sinrs(const BlockCirculantChannel<double>& channel, double rho, Equalizer equalizer);

}  // namespace otfs
