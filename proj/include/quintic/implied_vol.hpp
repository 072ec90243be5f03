#pragma once

// Undiscounted Black pricing on the forward, implied volatility inversion and
// a finite-difference ATM skew estimate.  All prices in this library are
// undiscounted (zero rates, S0 = 1), so Black on the forward is the single
// quoting convention used everywhere.

#include <span>

namespace quintic {

double norm_cdf(double x);
double norm_pdf(double x);

// Black price of a call/put on the forward with total volatility vol*sqrt(T).
// Degenerate cases (vol = 0 or T = 0) return intrinsic value.
double bs_price(double forward, double strike, double maturity, double vol, bool is_call);

double bs_vega(double forward, double strike, double maturity, double vol);

// Inverts bs_price in vol over [1e-6, 5].  Throws InvalidInput when the price
// violates the static no-arbitrage bounds (the message carries the violated
// bound) and NumericFailure when no volatility in the domain reproduces the
// price to within 1e-12 * forward.
double implied_vol(double price, double forward, double strike, double maturity,
                   bool is_call);

struct SkewEstimate {
    double skew = 0.0;    // d(iv)/dk at k = log(K/F) = 0
    double dk = 0.0;      // log-moneyness offset actually used
    double atm_iv = 0.0;  // interpolated ATM implied vol
};

// Central finite difference of the smile in log-moneyness, with linear
// interpolation between quoted strikes.  The offset starts at
// 0.5 * atm_iv * sqrt(T) and shrinks to fit inside the quoted strike range.
// Requires at least three strikes bracketing the forward.
SkewEstimate atm_skew(std::span<const double> strikes, std::span<const double> ivs,
                      double forward, double maturity);

}  // namespace quintic
