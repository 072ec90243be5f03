#pragma once

// Time-series estimators for the classic return/volatility stylized facts,
// plus a single-path market simulator that produces the intraday series the
// estimators consume.  Dates are opaque int64 keys: estimators only ever use
// them for alignment, so both day indices and real calendar serials work.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quintic/model.hpp"

namespace quintic {

struct DatedSeries {
    std::vector<std::int64_t> dates;  // strictly increasing
    std::vector<double> values;
};

struct IntradayReturns {
    int periods_per_day = 0;
    std::vector<std::int64_t> dates;  // one entry per whole day
    std::vector<double> r;            // row-major [day][period]
    int n_days() const { return static_cast<int>(dates.size()); }
};

// Annualized daily realized vol: sqrt(periods_per_year / periods_per_day *
// sum of squared intraday returns of the day).
DatedSeries realized_vol(const IntradayReturns& intraday, double periods_per_year);

// Sample autocorrelation with overall-mean centering, lags 0..max_lag.
// Requires length > max_lag + 30 and a non-constant series.
std::vector<double> acf(std::span<const double> series, int max_lag);

struct MomentRow {
    int horizon = 0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    int n_obs = 0;
};

struct MomentTermStructure {
    std::vector<MomentRow> rows;
    std::vector<int> omitted;  // horizons with fewer than 30 aggregated points
};

// Standardized third and fourth (excess) central moments of non-overlapping
// h-day aggregated returns, per horizon.
MomentTermStructure moment_term_structure(std::span<const double> returns,
                                          std::span<const int> horizons);

// Leverage effect over date-aligned series.  `variance` is a daily variance
// proxy (squared realized vol or squared returns).  For tau in
// [-max_lag, max_lag]:
//     L(tau) = < r_t (w_{t+tau} - <w>) > / ( <r^2> sqrt(<w>) ),
// where <r^2> and <w> are full-sample means on the common support and the
// cross moment averages over the overlap at each lag.  Output index i holds
// tau = i - max_lag.
std::vector<double> leverage(const DatedSeries& returns, const DatedSeries& variance,
                             int max_lag);

struct ZumbachReport {
    // Index tau-1 holds the statistic at lag tau = 1..max_lag.
    std::vector<double> c_fwd;     // C(tau)  = <(s2_t - <s2>) r^2_{t-tau}>
    std::vector<double> rho_fwd;   // normalized C(tau)
    std::vector<double> rho_bwd;   // same with r^2_{t+tau}
    std::vector<double> z;         // Z(tau) = sum_{i<=tau} rho_fwd(i) - rho_bwd(i)
    double rho_zero = 0.0;         // tau = 0 value (identical in both directions)
};

// Asymmetry between past squared returns predicting realized variance and
// the reverse.  `vols` holds realized vols (squared internally); each lag's
// means and normalization use the overlapping sample only, and the
// normalization is sqrt(<(s2 - <s2>)^2 (r^2 - <r^2>)^2>), which bounds
// |rho| by 1 via Cauchy-Schwarz.  Requires aligned length >= 10 * max_lag.
ZumbachReport zumbach(const DatedSeries& vols, const DatedSeries& returns, int max_lag);

struct BootstrapBands {
    std::vector<double> lo;  // 2.5th percentile per component
    std::vector<double> hi;  // 97.5th
};

// Circular block bootstrap over day indices 0..n_days-1.  `statistic` maps a
// resampled index sequence to a fixed-length vector; resamples run in
// parallel with per-resample deterministic seeds.
BootstrapBands block_bootstrap_ci(
    int n_days, int n_resamples, int block, std::uint64_t seed,
    const std::function<std::vector<double>(std::span<const std::int64_t>)>& statistic);

struct MarketSeries {
    IntradayReturns intraday;
    DatedSeries daily_returns;
    DatedSeries spot_vol;  // sigma sampled at each day's open
};

// Simulates one path of the model at intraday resolution (exact factor law,
// Euler log-price), h = 1 / (trading_days_per_year * periods_per_day) years.
// Day keys are 0..n_days-1.
MarketSeries simulate_market_series(const ModelParams& params,
                                    const ForwardVarianceCurve& curve, int n_days,
                                    int periods_per_day, std::uint64_t seed,
                                    int trading_days_per_year = 252);

}  // namespace quintic
