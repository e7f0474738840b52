#include "otfs/downlink.hpp"

namespace otfs {

Frame<double> build_tx_frame(const Grid& grid, const DownlinkTxFrame& tx) {
  const int n = grid.n(), m = grid.m();
  if (tx.u0_symbols.rows() != n || tx.u0_symbols.cols() != m) {
    throw InvalidArgument("U_0 symbols must be N x M");
  }
  if (tx.noma_symbols.rows() != m || tx.noma_symbols.cols() != n) {
    throw InvalidArgument("NOMA symbols must be M x N");
  }
  ComplexArray<double> x = isfft_operator<double>(tx.u0_symbols) * tx.power.gamma0();
  x += tx.noma_symbols.transpose() * tx.power.gamma1();
  return {grid, std::move(x), Domain::TimeFrequency};
}

Frame<double> pass_channel(const Frame<double>& tx, const BlockCirculantChannel<double>& channel, Engine& noise) {
  if (tx.domain != Domain::TimeFrequency) throw DomainMismatch("transmit frame must be time-frequency");
  if (!(tx.grid == channel.grid())) throw InvalidArgument("frame and channel grids differ");
  ComplexArray<double> y = channel.apply(sfft_operator<double>(tx.values));
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] += complex_gaussian(noise);
  return {tx.grid, std::move(y), Domain::DelayDoppler};
}

U0Reception u0_receive(const Frame<double>& tx, const PowerAllocation& power,
                       const BlockCirculantChannel<double>& channel, const LinkConfig& link,
                       Engine& noise, Equalizer equalizer) {
  const Frame<double> y = pass_channel(tx, channel, noise);
  const int nm = channel.grid().size();
  U0Reception out{Eigen::VectorXd::Zero(nm), std::vector<bool>(nm, true), make_frame<double>(channel.grid(), Domain::DelayDoppler)};

  try {
    if (equalizer == Equalizer::LE) {
      const auto d = diagonalize(channel);
      out.estimate = fd_le_equalize(y, d);
      out.sinr.setConstant(fd_le_sinr(d, link.rho, power));
    } else {
      const auto factors = cholesky_factors(channel);
      const ComplexArray<double> truth = sfft_operator<double>(tx.values);
      const Eigen::Map<const ComplexVector<double>> truth_vec(truth.data(), nm);
      out.estimate = fd_dfe_equalize(y, channel, factors, DfeFeedback<double>::genie(truth_vec));
      out.sinr = fd_dfe_sinrs(factors, link.rho, power);
    }
  } catch (const SingularChannel&) {
    return out;  // every symbol in outage
  }
  for (int i = 0; i < nm; ++i) out.outage[i] = is_outage(out.sinr[i], link.eps0());
  return out;
}

Frame<double> noma_stage1_equalize(const Frame<double>& y, const StaticChannel& channel) {
  if (y.domain != Domain::DelayDoppler) throw DomainMismatch("stage I operates on delay-Doppler frames");
  const int m = y.grid.m();
  if (channel.diag.size() != m) throw InvalidArgument("static channel length differs from M");
  if (channel.diag.cwiseAbs().minCoeff() < kSingularThreshold) throw SingularChannel("zero in the channel spectrum");

  // A_0 is diagonalized by the +j DFT along delay: (U A_0 x)[t] = D~^t (U x)[t].
  ComplexArray<double> t = y.values;
  detail::dft_rows(t, +1);
  t.array().rowwise() /= channel.diag.transpose().array();
  detail::dft_rows(t, -1);
  t /= static_cast<double>(m);
  return {y.grid, std::move(t), Domain::DelayDoppler};
}

Eigen::VectorXd noma_stage1(const StaticChannel& channel, const LinkConfig& link, const PowerAllocation& power,
                            Equalizer equalizer) {
  const auto m = channel.diag.size();
  if (equalizer == Equalizer::LE) {
    const double phi = channel.phi();
    return Eigen::VectorXd::Constant(m, std::isfinite(phi) ? noma_sinr(link.rho, power, phi) : 0.0);
  }
  return static_dfe_sinrs(channel, link.rho, power);
}

double noma_stage2(const StaticChannel& channel, double rho, double gamma1_sq, int subchannel) {
  if (subchannel < 0 || subchannel >= channel.diag.size()) throw InvalidArgument("subchannel out of range");
  return rho * gamma1_sq * std::norm(channel.diag[subchannel]);
}

bool noma_outage(const Eigen::VectorXd& stage1, double stage2, const LinkConfig& link) {
  if (is_outage(stage2, link.epsi())) return true;
  for (Eigen::Index l = 0; l < stage1.size(); ++l) {
    if (is_outage(stage1[l], link.eps0())) return true;
  }
  return false;
}

}  // namespace otfs
