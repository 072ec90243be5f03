#pragma once

// VIX-squared as an explicit bivariate polynomial in the factor state.
//
// Conditional on (X_t, Y_t) = (x, y), the instantaneous forward variance
// xi_t(s) = E[sigma_s^2 | F_t] is a polynomial in x and y, because
// Z_s | F_t is Gaussian with mean h_decay(t, s, x, y) and variance
// sigma_g_squared(t, s).  Integrating s over the one-month window [t, t+D]
// and scaling by 100^2 / D gives
//     VIX_t^2 = scale * sum_{l=0..10} sum_{m=0..l} beta[m,l] x^m y^(l-m).
// The coefficients require one deterministic time integral each; they are
// computed once and then evaluated for thousands of grid nodes, which is what
// makes exact VIX derivative pricing by cubature cheap.

#include <array>

#include "quintic/model.hpp"

namespace quintic {

// One-month window of the volatility index, in years.
inline constexpr double kVixWindowYears = 30.0 / 365.0;

// g0^2(t) = xi0(t) / E[p(Z_t)^2]: the deterministic input that makes the
// model's expected instantaneous variance match the forward variance curve.
double g0_squared(const ModelParams& params, const ForwardVarianceCurve& curve, double t);

// E[sigma_s^2 | X_t = x, Y_t = y] for s >= t.
double forward_variance(const ModelParams& params, const ForwardVarianceCurve& curve,
                        double t, double s, double x, double y);

// Raw moments E[N^k], k = 0..10, of N ~ Normal(mean, variance).
std::array<double, 11> gaussian_raw_moments(double mean, double variance);

struct VixPolynomial {
    double t = 0.0;      // observation time of the index
    double delta = 0.0;  // averaging window, years
    double scale = 0.0;  // 100^2 / delta
    // Coefficient of x^m y^(l-m) lives at beta[l*(l+1)/2 + m].
    std::array<double, 66> beta{};
    // Law of (X_t, Y_t), needed to price: VIX functionals are expectations of
    // this polynomial over the Gaussian state.
    FactorCovariance covariance;
};

constexpr int beta_index(int m, int l) { return l * (l + 1) / 2 + m; }

// Builds the coefficient table at observation time t.  The s-integrals use
// composite Gauss-Legendre with `nodes` points per smooth piece; pieces are
// delimited by the forward variance curve's knots inside [t, t+delta], where
// g0^2 jumps.  The integrand is otherwise analytic, so 64 nodes are far past
// the accuracy of everything downstream.
VixPolynomial build_vix_polynomial(const ModelParams& params,
                                   const ForwardVarianceCurve& curve, double t,
                                   int nodes = 64, double delta = kVixWindowYears);

// Evaluates VIX_t^2 (in index points squared, e.g. ~400 for a 20-vol market).
// The polynomial is nonnegative in exact arithmetic; roundoff slightly below
// zero (within -1e-10 * scale) is clamped to zero, anything more negative
// throws NumericFailure since it indicates a broken coefficient table.
double vix_squared(const VixPolynomial& poly, double x, double y);

}  // namespace quintic
