#include "otfs/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "otfs/downlink.hpp"
#include "otfs/errors.hpp"

namespace otfs {

double erlang_cdf(int stages, double x) {
  if (stages < 1) throw InvalidArgument("Erlang CDF needs at least one stage");
  if (!(x > 0.0)) return 0.0;
  if (x < stages) {
    // e^{-x} sum_{j >= a} x^j / j!: all terms positive, no cancellation near zero.
    double term = std::exp(-x);
    for (int j = 1; j <= stages; ++j) term *= x / j;
    double sum = 0.0;
    for (int j = stages + 1; term > sum * 1e-17; ++j) {
      sum += term;
      term *= x / j;
    }
    return std::min(sum, 1.0);
  }
  double term = std::exp(-x), head = 0.0;
  for (int j = 0; j < stages; ++j) {
    head += term;
    term *= x / (j + 1);
  }
  return std::clamp(1.0 - head, 0.0, 1.0);
}

double corollary1_outage(int p0, double rho, double gamma0_sq, double gamma1_sq, double r0) {
  if (p0 < 0) throw InvalidArgument("P0 must be non-negative");
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  const double eps0 = rate_threshold(r0);
  const double margin = gamma0_sq - gamma1_sq * eps0;
  if (!(margin > 0.0)) return 1.0;
  const double x = eps0 * (p0 + 1) / (rho * margin);
  return erlang_cdf(p0 + 1, x);
}

OutageBounds le_outage_bounds(int nm, double rho, double gamma0_sq, double gamma1_sq, double r0) {
  if (nm < 1) throw InvalidArgument("NM must be positive");
  const double eps0 = rate_threshold(r0);
  const double margin = gamma0_sq - gamma1_sq * eps0;
  if (!(margin > 0.0)) return {1.0, 1.0};
  const double t = eps0 / (rho * margin);
  return {-std::expm1(-t / nm), std::min(1.0, -nm * std::expm1(-t))};
}

}  // namespace otfs
