#pragma once

namespace otfs {

/// Outage of the last FD-DFE symbol of a user with P0+1 equal-power Rayleigh paths:
/// P((P0+1) lambda < x) with x = eps0 (P0+1) / (rho (g0^2 - g1^2 eps0)), an Erlang CDF.
/// Returns 1 when g0^2 <= g1^2 eps0 (interference-limited: outage at every SNR).
double corollary1_outage(int p0, double rho, double gamma0_sq, double gamma1_sq, double r0);

/// Sandwich on the FD-LE outage of U_0 in terms of the unit-exponential gain |D^{0,0}|^2.
struct OutageBounds {
  double lower;
  double upper;  ///< clipped to 1
};

OutageBounds le_outage_bounds(int nm, double rho, double gamma0_sq, double gamma1_sq, double r0);

/// Regularized lower incomplete gamma P(a, x) for integer a >= 1 (Erlang CDF with a stages).
double erlang_cdf(int stages, double x);

}  // namespace otfs
