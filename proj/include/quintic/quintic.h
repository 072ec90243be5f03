#ifndef QUINTIC_QUINTIC_H
#define QUINTIC_QUINTIC_H

/*
 * C interface to the quintic OU volatility library.
 *
 * Conventions:
 *   - Every fallible function returns a qou_status; QOU_OK is 0.  On failure
 *     qou_last_error() returns a message for the calling thread, valid until
 *     the next library call on that thread.
 *   - Objects are opaque handles created by qou_*_create/load functions and
 *     released with the matching qou_*_free (safe on NULL).
 *   - Output arrays are caller-allocated; sizes come from the matching
 *     *_size query or are implied by the inputs (documented per function).
 *   - Strings returned through char** are library-allocated; release them
 *     with qou_string_free.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define QOU_API __declspec(dllexport)
#else
#define QOU_API __attribute__((visibility("default")))
#endif

typedef enum qou_status {
    QOU_OK = 0,
    QOU_INVALID_INPUT = 1,  /* bad argument or malformed input data */
    QOU_NUMERIC_FAILURE = 2, /* computation could not produce a reliable value */
    QOU_IO_ERROR = 3,        /* file access failed */
    QOU_INTERNAL_ERROR = 4   /* unexpected condition; please report */
} qou_status;

QOU_API const char* qou_version(void);
QOU_API const char* qou_last_error(void);
QOU_API void qou_string_free(char* s);

/* Caps worker threads library-wide; 0 restores the hardware default. */
QOU_API qou_status qou_set_max_threads(int n);

/* ------------------------------------------------------------------ */
/* Model parameters and forward variance curve                         */

typedef struct qou_params qou_params;
typedef struct qou_curve qou_curve;

/* alpha has n_alpha entries, 5 (leading coefficient pinned at 1) or 6. */
QOU_API qou_status qou_params_create(double lambda_x, double lambda_y, double theta,
                                     double rho, const double* alpha, size_t n_alpha,
                                     int require_martingale_safe, qou_params** out);
QOU_API qou_status qou_params_preset(const char* name, qou_params** out);
/* JSON array of preset names. */
QOU_API qou_status qou_preset_names(char** out_json);
QOU_API void qou_params_free(qou_params* p);
QOU_API qou_status qou_params_get(const qou_params* p, double* lambda_x,
                                  double* lambda_y, double* theta, double* rho,
                                  double alpha[6], int* martingale_safe);

QOU_API qou_status qou_curve_create(const double* knots, const double* values,
                                    size_t n, qou_curve** out);
QOU_API qou_status qou_curve_flat(double value, qou_curve** out);
QOU_API void qou_curve_free(qou_curve* c);
QOU_API qou_status qou_curve_size(const qou_curve* c, size_t* n);
QOU_API qou_status qou_curve_get(const qou_curve* c, double* knots, double* values);
QOU_API qou_status qou_curve_value(const qou_curve* c, double t, double* out);
QOU_API qou_status qou_curve_integral(const qou_curve* c, double a, double b,
                                      double* out);

/* Piecewise-constant curve from a variance-swap term structure
 * (maturity, total variance) pairs; rejects calendar arbitrage. */
QOU_API qou_status qou_bootstrap_forward_variance(const double* maturities,
                                                  const double* total_variance,
                                                  size_t n, qou_curve** out);

/* Model document JSON: {"lambda_x", "lambda_y", "theta", "rho", "alpha",
 * "xi0_knots", "xi0_values"}. */
QOU_API qou_status qou_model_from_json(const char* text, qou_params** params,
                                       qou_curve** curve);
QOU_API qou_status qou_model_to_json(const qou_params* params, const qou_curve* curve,
                                     char** out_json);

/* E[sigma_s^2 | state (x, y) at time t], s >= t. */
QOU_API qou_status qou_forward_variance(const qou_params* p, const qou_curve* c,
                                        double t, double s, double x, double y,
                                        double* out);

/* ------------------------------------------------------------------ */
/* Monte Carlo configuration                                           */

enum { QOU_ESTIMATOR_CONDITIONAL = 0, QOU_ESTIMATOR_PLAIN = 1 };

typedef struct qou_mc_config {
    int64_t n_paths;
    int steps_per_year;
    uint64_t seed;
    int antithetic;  /* 0/1 */
    int estimator;   /* QOU_ESTIMATOR_* */
} qou_mc_config;

QOU_API qou_status qou_mc_config_default(qou_mc_config* out);
QOU_API qou_status qou_mc_config_from_json(const char* text, qou_mc_config* out);

/* ------------------------------------------------------------------ */
/* VIX pricing                                                         */

typedef struct qou_vix_poly qou_vix_poly;
typedef struct qou_grid qou_grid;

enum { QOU_GRID_QUANTIZER = 0, QOU_GRID_GAUSS_HERMITE = 1 };

QOU_API qou_status qou_vix_poly_build(const qou_params* p, const qou_curve* c,
                                      double t, int quad_nodes, qou_vix_poly** out);
QOU_API void qou_vix_poly_free(qou_vix_poly* poly);
QOU_API qou_status qou_vix_poly_to_json(const qou_vix_poly* poly, char** out_json);
/* VIX_t as a function of the factor state, in index points. */
QOU_API qou_status qou_vix_value(const qou_vix_poly* poly, double x, double y,
                                 double* out);

/* size is the total node count (a Gauss-Hermite grid uses the smallest
 * per-axis order whose tensor square holds at least `size` nodes).
 * data_dir NULL means the built-in data directory.  When allow_fallback is
 * nonzero a missing quantizer file degrades to Gauss-Hermite and *fell_back
 * (optional) is set. */
QOU_API qou_status qou_grid_load(int kind, int size, const char* data_dir,
                                 int allow_fallback, int* fell_back, qou_grid** out);
/* Equal-weight grid of pseudo-random standard normal pairs, for Monte Carlo
 * cross-checks of the cubature prices. */
QOU_API qou_status qou_grid_mc(int64_t n, uint64_t seed, qou_grid** out);
QOU_API void qou_grid_free(qou_grid* g);
QOU_API qou_status qou_grid_size(const qou_grid* g, size_t* n);

QOU_API qou_status qou_vix_future(const qou_vix_poly* poly, const qou_grid* grid,
                                  double* out);
QOU_API qou_status qou_vix_call(const qou_vix_poly* poly, const qou_grid* grid,
                                double strike, double* out);
/* Black implied vols on the VIX future; out_iv has n entries. */
QOU_API qou_status qou_vix_smile(const qou_vix_poly* poly, const qou_grid* grid,
                                 const double* strikes, size_t n, double* out_iv);

/* ------------------------------------------------------------------ */
/* Black-Scholes utilities                                             */

QOU_API qou_status qou_bs_price(double forward, double strike, double maturity,
                                double vol, int is_call, double* out);
QOU_API qou_status qou_implied_vol(double price, double forward, double strike,
                                   double maturity, int is_call, double* out);

/* ------------------------------------------------------------------ */
/* SPX smiles by Monte Carlo                                           */

typedef struct qou_smile qou_smile;

/* strikes is the concatenation of per-maturity strike lists; n_strikes[i]
 * gives the length of maturity i's list. */
QOU_API qou_status qou_spx_smile(const qou_params* p, const qou_curve* c,
                                 const double* maturities, size_t n_maturities,
                                 const double* strikes, const size_t* n_strikes,
                                 const qou_mc_config* config, qou_smile** out);
QOU_API void qou_smile_free(qou_smile* s);
QOU_API qou_status qou_smile_size(const qou_smile* s, size_t* n_points);
/* Any output pointer may be NULL.  ok = 0 marks a failed vol inversion. */
QOU_API qou_status qou_smile_point(const qou_smile* s, size_t i, double* maturity,
                                   double* strike, double* iv, double* iv_se,
                                   double* price, double* price_se, int* ok);
QOU_API qou_status qou_smile_forward(const qou_smile* s, size_t maturity_index,
                                     double* out);

/* ------------------------------------------------------------------ */
/* Skew-stickiness ratio                                               */

typedef struct qou_ssr_report qou_ssr_report;

QOU_API qou_status qou_model_ssr(const qou_params* p, const qou_curve* c,
                                 const double* maturities, size_t n, double epsilon,
                                 const qou_mc_config* config, qou_ssr_report** out);
QOU_API void qou_ssr_report_free(qou_ssr_report* r);
QOU_API qou_status qou_ssr_size(const qou_ssr_report* r, size_t* n_points);
QOU_API qou_status qou_ssr_point(const qou_ssr_report* r, size_t i, double* maturity,
                                 double* ssr, double* stderr_out, double* atm_iv,
                                 double* atm_skew, double* epsilon,
                                 double* ssr_half_epsilon);
QOU_API qou_status qou_ssr_sigma0(const qou_ssr_report* r, double* out);

/* Rolling-window regression SSR from daily market series.  All input arrays
 * have n entries; output arrays must hold at least n entries (entries with
 * out_ok[i] = 0 are gaps).  *out_n receives the number of windows written
 * (n - window when n > window, else 0). */
QOU_API qou_status qou_empirical_ssr(const int64_t* dates, const double* atm_iv,
                                     const double* atm_skew, const double* log_spot,
                                     size_t n, int window, double outlier_sigmas,
                                     int min_obs, int64_t* out_dates,
                                     double* out_values, int* out_n_used,
                                     int* out_ok, size_t* out_n);

/* ------------------------------------------------------------------ */
/* Market-series simulation and stylized-fact estimators               */

typedef struct qou_market qou_market;

QOU_API qou_status qou_market_simulate(const qou_params* p, const qou_curve* c,
                                       int n_days, int periods_per_day, uint64_t seed,
                                       int trading_days_per_year, qou_market** out);
QOU_API void qou_market_free(qou_market* m);
QOU_API qou_status qou_market_dims(const qou_market* m, int* n_days,
                                   int* periods_per_day);
/* out has n_days * periods_per_day entries, day-major. */
QOU_API qou_status qou_market_intraday(const qou_market* m, double* out);
/* Each output (optional individually) has n_days entries. */
QOU_API qou_status qou_market_daily(const qou_market* m, int64_t* out_dates,
                                    double* out_returns, double* out_spot_vol);

/* Annualized realized vol per day from day-major intraday returns;
 * out has n_days entries. */
QOU_API qou_status qou_realized_vol(const double* intraday, int n_days,
                                    int periods_per_day, double periods_per_year,
                                    double* out);

/* Autocorrelation at lags 0..max_lag; out has max_lag + 1 entries. */
QOU_API qou_status qou_acf(const double* series, size_t n, int max_lag, double* out);

/* Skewness and excess kurtosis of non-overlapping horizon-aggregated
 * returns.  Outputs have n_horizons entries; out_ok[i] = 0 marks a horizon
 * with too few aggregated observations (other outputs are 0 there). */
QOU_API qou_status qou_moment_term_structure(const double* returns, size_t n,
                                             const int* horizons, size_t n_horizons,
                                             double* out_skewness,
                                             double* out_excess_kurtosis,
                                             int* out_n_obs, int* out_ok);

/* L(tau) for tau in [-max_lag, max_lag]; out has 2*max_lag + 1 entries,
 * index i holding tau = i - max_lag.  Series are date-aligned internally. */
QOU_API qou_status qou_leverage(const int64_t* dates_r, const double* returns,
                                size_t n_r, const int64_t* dates_v,
                                const double* variance, size_t n_v, int max_lag,
                                double* out);

/* Zumbach asymmetry.  Each output (optional individually) has max_lag
 * entries, index i holding lag tau = i + 1. */
QOU_API qou_status qou_zumbach(const int64_t* dates_vol, const double* vols,
                               size_t n_vol, const int64_t* dates_r,
                               const double* returns, size_t n_r, int max_lag,
                               double* out_rho_fwd, double* out_rho_bwd,
                               double* out_z, double* out_rho_zero);

/* Statistic over a resampled sequence of day indices (values in
 * [0, n_days)); must fill out[0..dim). */
typedef void (*qou_statistic_fn)(void* ctx, const int64_t* day_indices,
                                 size_t n_days, double* out);

/* Circular block bootstrap; out_lo/out_hi receive the 2.5th/97.5th
 * percentile per component (dim entries each). */
QOU_API qou_status qou_block_bootstrap_ci(int n_days, int n_resamples, int block,
                                          uint64_t seed, qou_statistic_fn statistic,
                                          void* ctx, size_t dim, double* out_lo,
                                          double* out_hi);

/* ------------------------------------------------------------------ */
/* Calibration                                                         */

typedef struct qou_calib qou_calib;

/* Quote arrays are parallel (maturity, strike, bid vol, ask vol) columns.
 * settings_json configures weights, the free-parameter mask, optimizer
 * budget, MC config, grids, the SSR penalty, and xi0 handling; see the
 * calibration schema in the docs.  NULL or "" means all defaults. */
QOU_API qou_status qou_calibrate(
    const qou_params* initial, const qou_curve* initial_curve,
    const double* spx_maturity, const double* spx_strike, const double* spx_bid,
    const double* spx_ask, size_t n_spx,
    const double* vix_maturity, const double* vix_strike, const double* vix_bid,
    const double* vix_ask, size_t n_vix,
    const double* futures_maturity, const double* futures_price, size_t n_futures,
    const double* varswap_maturity, const double* varswap_total_variance,
    size_t n_varswaps,
    const char* settings_json, qou_calib** out);

QOU_API void qou_calib_free(qou_calib* r);
QOU_API qou_status qou_calib_params(const qou_calib* r, qou_params** params,
                                    qou_curve** curve);
QOU_API qou_status qou_calib_loss(const qou_calib* r, double* total, double* spx,
                                  double* vix, double* futures, double* ssr);
QOU_API qou_status qou_calib_stats(const qou_calib* r, int* n_evals,
                                   int* restarts_used);
QOU_API qou_status qou_calib_to_json(const qou_calib* r, char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* QUINTIC_QUINTIC_H */
