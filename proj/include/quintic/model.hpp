#pragma once

// Two-factor quintic Ornstein-Uhlenbeck stochastic volatility model.
//
// Spot dynamics (undiscounted, S0 = 1 by convention throughout):
//     dS_t = S_t sigma_t (rho dW_t + sqrt(1-rho^2) dWperp_t)
//     sigma_t = g0(t) * p(Z_t),   p(z) = sum_{k=0..5} alpha_k z^k
//     Z_t = theta X_t + (1-theta) Y_t
// where X and Y are OU processes with speeds lambda_x, lambda_y driven by the
// *same* Brownian motion W (X_0 = Y_0 = 0):
//     dX_t = -lambda_x X_t dt + dW_t,   dY_t = -lambda_y Y_t dt + dW_t.
// The deterministic input g0 is chosen so that E[sigma_t^2] matches a given
// forward variance curve xi0; see g0_squared() in vix.hpp.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace quintic {

struct ModelParams {
    double lambda_x = 0.0;  // fast mean reversion speed
    double lambda_y = 0.0;  // slow mean reversion speed
    double theta = 0.0;     // mixing weight between the two factors
    double rho = 0.0;       // spot/vol correlation
    std::array<double, 6> alpha{};  // polynomial coefficients, degree 0..5

    // True when the parameters were checked against the sufficient condition
    // for S to be a true martingale (alpha[5] > 0 and rho <= 0).
    bool martingale_safe = false;
};

// Validates and assembles model parameters.  Throws InvalidInput when
// lambda_x <= 0, lambda_y <= 0, theta outside [0,1], |rho| >= 1, or when
// `require_martingale_safe` is set and the sufficient condition fails.
ModelParams make_params(double lambda_x, double lambda_y, double theta, double rho,
                        const std::array<double, 6>& alpha,
                        bool require_martingale_safe = false);

// Convenience overload: alpha_5 defaults to 1 when omitted.
ModelParams make_params(double lambda_x, double lambda_y, double theta, double rho,
                        const std::array<double, 5>& alpha_head,
                        bool require_martingale_safe = false);

// Named parameter sets shipped with the library (see README for the list).
ModelParams preset_params(const std::string& name);
std::vector<std::string> preset_names();

// p(z) and the coefficients of p(z)^2.
double polynomial_value(const std::array<double, 6>& alpha, double z);
std::array<double, 11> alpha_convolution(const std::array<double, 6>& alpha);

// E[(G - E[G])^p] for G Gaussian with the given variance: 0 for odd p,
// variance^(p/2) * (p-1)!! for even p.  p must lie in [0, 32].
double gaussian_central_moment(double variance, int p);

// Covariance matrix of the zero-mean Gaussian pair (X_t, Y_t).
struct FactorCovariance {
    double t = 0.0;
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

FactorCovariance state_covariance(const ModelParams& params, double t);

// Var[Z_t] = theta^2 xx + 2 theta (1-theta) xy + (1-theta)^2 yy.
double z_variance(const ModelParams& params, double t);

// E[p(Z_t)^2], the normalisation that ties sigma to the forward variance.
double expected_p_squared(const ModelParams& params, double t);

// Conditional decomposition of Z_s given the state at t <= s:
//   Z_s | (X_t, Y_t) = h_decay(t, s, X_t, Y_t) + G_t^s,
// with G_t^s zero-mean Gaussian of variance sigma_g_squared(t, s).
double h_decay(const ModelParams& params, double t, double s, double x, double y);
double sigma_g_squared(const ModelParams& params, double t, double s);

// Piecewise-constant forward variance curve xi0(t).  Knots are the *left*
// edges of the constancy intervals; knots[0] must be 0 and the curve is
// right-continuous with flat extrapolation beyond the last knot.
class ForwardVarianceCurve {
public:
    ForwardVarianceCurve(std::vector<double> knots, std::vector<double> values);
    static ForwardVarianceCurve flat(double value);

    double value(double t) const;
    // Exact integral of xi0 over [a, b], a <= b.
    double integral(double a, double b) const;

    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> knots_;
    std::vector<double> values_;
};

// Simulates Z on a uniform grid of step h through its *path-dependent* SDE
//   dZ_t = ( -(lambda_x theta + lambda_y (1-theta)) Z_t
//            + theta (1-theta) (lambda_y - lambda_x)^2 Zhat_t ) dt + dW_t,
//   Zhat_t = int_0^t exp(-kappa (t-s)) Z_s ds,
//   kappa  = lambda_x (1-theta) + lambda_y theta,
// consuming the caller's Brownian increments.  The running integral Zhat uses
// the exact one-step decay exp(-kappa h) so the only discretisation error is
// the Euler drift.  Returns Z at grid times 0, h, ..., n*h (n = dW.size()).
//
// This path is deliberately independent of the (X, Y) representation: it
// exists so tests can check that theta X + (1-theta) Y solves this SDE.
std::vector<double> simulate_z_pathdependent(const ModelParams& params,
                                             std::span<const double> dW, double h);

}  // namespace quintic
