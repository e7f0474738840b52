#include "otfs/uplink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace otfs {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

constexpr int kExactSumLimit = 20;

void check_outage_args(int k_users, double epsilon) {
  if (k_users < 1) throw InvalidArgument("K must be at least 1");
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

// sum_k C(K,k) (-1)^k e^{-k eps / rho} / (k eps + 1); rho = +inf drops the exponential.
double alternating_sum(int k_users, double epsilon, double rho) {
  const Wide eps(epsilon);
  const Wide decay = std::isinf(rho) ? Wide(1) : Wide(exp(-eps / Wide(rho)));
  Wide sum = 0, binom = 1, power = 1;
  for (int k = 0; k <= k_users; ++k) {
    const Wide term = binom * power / (Wide(k) * eps + 1);
    sum += (k % 2 == 0) ? term : Wide(-term);
    binom = binom * (k_users - k) / (k + 1);
    power *= decay;
  }
  return static_cast<double>(sum);
}

// int_0^inf (1 - e^{-eps (1 + rho y) / rho})^K e^{-y} dy
double outage_integral(int k_users, double epsilon, double rho) {
  auto integrand = [=](double y) {
    const double exponent = std::isinf(rho) ? epsilon * y : epsilon * (1.0 + rho * y) / rho;
    return std::pow(-std::expm1(-exponent), k_users) * std::exp(-y);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
}

double outage_value(int k_users, double epsilon, double rho) {
  const double p = k_users <= kExactSumLimit ? alternating_sum(k_users, epsilon, rho)
                                             : outage_integral(k_users, epsilon, rho);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

ComplexArray<double> time_frequency_gains(const DiagonalizedChannel<double>& d) {
  const int n = d.grid.n(), m = d.grid.m();
  ComplexArray<double> h(n, m);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < m; ++c) h(r, c) = d.d_values((n - r) % n, (m - c) % m);
  }
  return h;
}

std::complex<double> uplink_stage1_estimate(const UplinkObservation& obs, int q, int n, int m) {
  if (q < 0 || q >= static_cast<int>(obs.h.size())) throw InvalidArgument("transmitter index out of range");
  if (n < 0 || n >= obs.grid.n() || m < 0 || m >= obs.grid.m()) throw InvalidArgument("cell out of range");
  return obs.y(n, m) / obs.h[q](n, m);
}

double uplink_stage1_sinr(std::complex<double> h_i, std::complex<double> h_0, double rho) {
  return rho * std::norm(h_i) / (rho * std::norm(h_0) + 1.0);
}

double adaptive_rate(std::complex<double> h_i, std::complex<double> h_0, double rho) {
  return std::log2(1.0 + uplink_stage1_sinr(h_i, h_0, rho));
}

double closed_form_outage(int k_users, double epsilon, double rho) {
  check_outage_args(k_users, epsilon);
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  return outage_value(k_users, epsilon, rho);
}

double error_floor(int k_users, double epsilon) {
  check_outage_args(k_users, epsilon);
  return outage_value(k_users, epsilon, std::numeric_limits<double>::infinity());
}

double floor_approx(int k_users, double epsilon) {
  check_outage_args(k_users, epsilon);
  return std::tgamma(k_users + 1.0) * std::pow(epsilon, k_users);
}

Eigen::VectorXd uplink_stage2_sinrs(const BlockCirculantChannel<double>& channel, double rho, Equalizer equalizer) {
  const auto interference_free = PowerAllocation::oma();
  const int nm = channel.grid().size();
  if (equalizer == Equalizer::LE) {
    return Eigen::VectorXd::Constant(nm, fd_le_sinr(diagonalize(channel), rho, interference_free));
  }
  try {
    return fd_dfe_sinrs(cholesky_factors(channel), rho, interference_free);
  } catch (const SingularChannel&) {
    return Eigen::VectorXd::Zero(nm);
  }
}

}  // namespace otfs
