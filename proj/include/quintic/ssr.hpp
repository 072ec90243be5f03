#pragma once

// Skew-stickiness ratio.
//
// Model-implied: the regression coefficient of the ATM implied vol move on
// skew * d(log S) in the small-move limit.  A spot shock dS/S = epsilon is
// equivalent (through the common driver W) to shifting both factors by
// epsilon * rho / sigma_0 with sigma_0 = g0(0) p(0); the SSR is then
//     [ativ(bumped state) - atmiv(base)] / (epsilon * atm skew).
// Bumped and base runs share every random number, so the difference is a
// smooth function of the state shift and the epsilon -> 0 bias can be probed
// by halving epsilon on the same draws (reported alongside the estimate).
//
// Empirical: a rolling no-intercept regression of daily ATM vol changes on
// skew * daily log-returns, with the same definition the model-side estimate
// converges to.

#include <cstdint>
#include <span>
#include <vector>

#include "quintic/mc.hpp"
#include "quintic/model.hpp"

namespace quintic {

struct SsrPoint {
    double maturity = 0.0;
    double ssr = 0.0;
    double se = 0.0;           // from the paired ATM price differences
    double atm_iv = 0.0;       // base run
    double atm_iv_bumped = 0.0;
    double atm_skew = 0.0;     // base run, central difference
    double epsilon = 0.0;
    double ssr_half_epsilon = 0.0;  // same estimator at epsilon/2, same draws
};

struct SsrReport {
    std::vector<SsrPoint> points;
    double sigma0 = 0.0;  // spot vol at t = 0 implied by the parameters
    McConfig config;
};

// Throws InvalidInput when alpha[0] = 0 (sigma_0 vanishes, the bump map is
// undefined) and NumericFailure when |atm skew| < 1e-4 at some maturity (the
// ratio is then dominated by noise).  Pricing always uses the conditional
// estimator: the orthogonal Brownian is integrated out exactly, so the
// paired differences carry no W-perp noise at all.
SsrReport model_ssr(const ModelParams& params, const ForwardVarianceCurve& curve,
                    std::span<const double> maturities, double epsilon,
                    const McConfig& config);

struct EmpiricalSsrPoint {
    std::int64_t date = 0;  // window end date
    double value = 0.0;
    int n_used = 0;   // observations surviving the outlier filter
    bool ok = false;  // false marks a gap (too few clean observations)
};

// Rolling window regression over aligned daily series.  Observation t pairs
// the vol change iv[t] - iv[t-1] with skew[t-1] * (log_spot[t] -
// log_spot[t-1]); within each window, points beyond `outlier_sigmas` sample
// standard deviations from the window mean (in either coordinate) are
// dropped.  Windows with fewer than `min_obs` survivors are reported as gaps
// rather than numbers.
std::vector<EmpiricalSsrPoint> empirical_ssr(std::span<const std::int64_t> dates,
                                             std::span<const double> atm_iv,
                                             std::span<const double> atm_skew,
                                             std::span<const double> log_spot,
                                             int window = 120, double outlier_sigmas = 2.0,
                                             int min_obs = 10);

}  // namespace quintic
