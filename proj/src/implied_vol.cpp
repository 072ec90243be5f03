#include "quintic/implied_vol.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "quintic/errors.hpp"

namespace quintic {

namespace {

constexpr double kVolMin = 1e-6;
constexpr double kVolMax = 5.0;
constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

double norm_cdf(double x) {
    // erfc-based form stays accurate deep in the left tail (x ~ -37).
    return 0.5 * std::erfc(-x / kSqrt2);
}

double norm_pdf(double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

double bs_price(double forward, double strike, double maturity, double vol, bool is_call) {
    if (!(forward > 0.0)) throw InvalidInput("bs_price: forward must be positive");
    if (!(strike > 0.0)) throw InvalidInput("bs_price: strike must be positive");
    if (maturity < 0.0) throw InvalidInput("bs_price: maturity must be nonnegative");
    if (vol < 0.0) throw InvalidInput("bs_price: vol must be nonnegative");

    const double stdev = vol * std::sqrt(maturity);
    if (stdev == 0.0) {
        const double intrinsic = is_call ? forward - strike : strike - forward;
        return std::max(intrinsic, 0.0);
    }
    const double d1 = std::log(forward / strike) / stdev + 0.5 * stdev;
    const double d2 = d1 - stdev;
    if (is_call) return forward * norm_cdf(d1) - strike * norm_cdf(d2);
    return strike * norm_cdf(-d2) - forward * norm_cdf(-d1);
}

double bs_vega(double forward, double strike, double maturity, double vol) {
    if (!(forward > 0.0) || !(strike > 0.0))
        throw InvalidInput("bs_vega: forward and strike must be positive");
    if (maturity <= 0.0 || vol <= 0.0) return 0.0;
    const double stdev = vol * std::sqrt(maturity);
    const double d1 = std::log(forward / strike) / stdev + 0.5 * stdev;
    return forward * norm_pdf(d1) * std::sqrt(maturity);
}

double implied_vol(double price, double forward, double strike, double maturity,
                   bool is_call) {
    if (!(forward > 0.0)) throw InvalidInput("implied_vol: forward must be positive");
    if (!(strike > 0.0)) throw InvalidInput("implied_vol: strike must be positive");
    if (!(maturity > 0.0)) throw InvalidInput("implied_vol: maturity must be positive");

    const double intrinsic =
        std::max(is_call ? forward - strike : strike - forward, 0.0);
    const double upper = is_call ? forward : strike;
    if (price < intrinsic)
        throw InvalidInput("implied_vol: price " + std::to_string(price) +
                           " below intrinsic value " + std::to_string(intrinsic));
    if (price >= upper)
        throw InvalidInput("implied_vol: price " + std::to_string(price) +
                           " at or above upper bound " + std::to_string(upper));

    const double tol = 1e-12 * forward;
    auto diff = [&](double vol) {
        return bs_price(forward, strike, maturity, vol, is_call) - price;
    };

    double lo = kVolMin;
    double hi = kVolMax;
    double flo = diff(lo);
    double fhi = diff(hi);
    if (flo > tol)
        throw NumericFailure("implied_vol: price below the vol = 1e-6 floor price");
    if (fhi < -tol)
        throw NumericFailure("implied_vol: price above the vol = 5 cap price");
    if (std::fabs(flo) <= tol && std::fabs(flo) <= std::fabs(fhi)) return lo;
    if (std::fabs(fhi) <= tol) return hi;

    // Newton from a mid guess, falling back to bisection whenever the step
    // leaves the bracket or vega degenerates.  The bracket-width stopping rule
    // keeps relative accuracy in vol even far in the wings where the price
    // tolerance alone is meaningless.
    double vol = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double f = diff(vol);
        if (f > 0.0)
            hi = vol;
        else
            lo = vol;
        if (std::fabs(f) <= tol && hi - lo <= 1e-11 * vol) return vol;

        const double vega = bs_vega(forward, strike, maturity, vol);
        double next = (vega > 1e-300) ? vol - f / vega : 0.0;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 5e-16 * vol) return vol;  // bracket exhausted at double precision
        vol = next;
    }
    // Exhausting the iteration budget with an intact bracket means the price
    // function is too flat to separate vols; report the midpoint if it meets
    // the price tolerance, otherwise fail loudly.
    if (std::fabs(diff(vol)) <= tol) return vol;
    throw NumericFailure("implied_vol: no convergence within iteration budget");
}

SkewEstimate atm_skew(std::span<const double> strikes, std::span<const double> ivs,
                      double forward, double maturity) {
    if (strikes.size() != ivs.size())
        throw InvalidInput("atm_skew: strikes/ivs size mismatch");
    if (strikes.size() < 3)
        throw InvalidInput("atm_skew: need at least three strikes");
    if (!(forward > 0.0) || !(maturity > 0.0))
        throw InvalidInput("atm_skew: forward and maturity must be positive");

    // Work in log-moneyness, sorted.
    std::vector<std::pair<double, double>> pts(strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        if (!(strikes[i] > 0.0)) throw InvalidInput("atm_skew: strikes must be positive");
        pts[i] = {std::log(strikes[i] / forward), ivs[i]};
    }
    std::sort(pts.begin(), pts.end());
    const double k_lo = pts.front().first;
    const double k_hi = pts.back().first;
    if (!(k_lo < 0.0 && k_hi > 0.0))
        throw InvalidInput("atm_skew: strikes must bracket the forward");

    auto interp = [&](double k) {
        auto it = std::lower_bound(pts.begin(), pts.end(), k,
                                   [](const auto& p, double key) { return p.first < key; });
        if (it == pts.begin()) return it->second;
        if (it == pts.end()) return (it - 1)->second;
        const auto& right = *it;
        const auto& left = *(it - 1);
        const double w = (k - left.first) / (right.first - left.first);
        return (1.0 - w) * left.second + w * right.second;
    };

    SkewEstimate est;
    est.atm_iv = interp(0.0);
    // Offset scaled to the smile's own width, clipped into the quoted range.
    double dk = 0.5 * est.atm_iv * std::sqrt(maturity);
    dk = std::min({dk, -k_lo, k_hi});
    if (!(dk > 0.0)) throw InvalidInput("atm_skew: degenerate strike range");
    est.dk = dk;
    est.skew = (interp(dk) - interp(-dk)) / (2.0 * dk);
    return est;
}

}  // namespace quintic
