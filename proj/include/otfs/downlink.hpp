#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "otfs/equalizers.hpp"
#include "otfs/rng.hpp"
#include "otfs/transforms.hpp"

namespace otfs {

/// SINR threshold 2^R - 1 for a target rate R in bits per channel use.
inline double rate_threshold(double rate) { return std::exp2(rate) - 1.0; }

/// Outage means log2(1 + sinr) falls below the target rate.
inline bool is_outage(double sinr, double threshold) { return !(sinr >= threshold); }

struct LinkConfig {
  double rho;  ///< linear transmit SNR, noise power fixed at 1
  double r0;   ///< high-mobility user's target rate
  double ri;   ///< NOMA users' target rate

  LinkConfig(double rho_, double r0_, double ri_) : rho(rho_), r0(r0_), ri(ri_) {
    if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
    if (!(r0 > 0.0) || !(ri > 0.0)) throw InvalidArgument("target rates must be positive");
  }

  double eps0() const { return rate_threshold(r0); }
  double epsi() const { return rate_threshold(ri); }
};

struct DownlinkTxFrame {
  ComplexArray<double> u0_symbols;    ///< N x M, x_0[k, l]
  ComplexArray<double> noma_symbols;  ///< M x N, row m holds the N symbols of the user on subchannel m
  PowerAllocation power;
};

/// X[n,m] = gamma0 ISFFT(x_0)[n,m] + gamma1 x_{m+1}(n).
Frame<double> build_tx_frame(const Grid& grid, const DownlinkTxFrame& tx);

struct U0Reception {
  Eigen::VectorXd sinr;      ///< per symbol, k*M + l order
  std::vector<bool> outage;  ///< per symbol
  Frame<double> estimate;    ///< equalizer output (includes residual NOMA interference and noise)
};

/// Passes the time-frequency frame through U_0's channel with unit-variance delay-Doppler
/// noise and equalizes it, treating the NOMA signals as noise. DFE runs in genie mode.
U0Reception u0_receive(const Frame<double>& tx, const PowerAllocation& power,
                       const BlockCirculantChannel<double>& channel, const LinkConfig& link,
                       Engine& noise, Equalizer equalizer);

/// Received delay-Doppler frame y = H SFFT(X) + z, z ~ CN(0, 1) per cell.
Frame<double> pass_channel(const Frame<double>& tx, const BlockCirculantChannel<double>& channel, Engine& noise);

/// Stage I at a NOMA user: each of the N length-M sub-vectors of y is equalized by the
/// M-point circulant A_0 (zero forcing).
Frame<double> noma_stage1_equalize(const Frame<double>& y, const StaticChannel& channel);

/// M SINRs for detecting x_0 at a NOMA user; the same for every Doppler index k.
/// LE: rho g0^2 / (rho g1^2 + (1/M) sum_l |D~^l|^{-2}). DFE: uses the pivots of A_0^H A_0.
Eigen::VectorXd noma_stage1(const StaticChannel& channel, const LinkConfig& link, const PowerAllocation& power,
                            Equalizer equalizer);

/// Stage II SNR of the user on `subchannel` after U_0's signal is removed:
/// rho gamma1^2 |D~^subchannel|^2, identical for all n.
double noma_stage2(const StaticChannel& channel, double rho, double gamma1_sq, int subchannel);

/// Outage unless stage II clears eps_i and every stage-I SINR clears eps_0.
bool noma_outage(const Eigen::VectorXd& stage1, double stage2, const LinkConfig& link);

}  // namespace otfs
