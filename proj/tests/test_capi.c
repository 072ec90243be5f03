/* End-to-end exercise of the shared-library C interface.  Compiled as C so
 * the header's C-ness and the ABI are what is actually under test; numeric
 * depth lives in the C++ suites. */

#include <quintic/quintic.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                      \
    do {                                                                 \
        if (!(cond)) {                                                   \
            ++failures;                                                  \
            fprintf(stderr, "FAIL %s:%d: %s\n", __FILE__, __LINE__, #cond); \
        }                                                                \
    } while (0)

#define CHECK_OK(expr) CHECK((expr) == QOU_OK)

static void test_version_and_presets(void) {
    CHECK(qou_version() != NULL);
    char* names = NULL;
    CHECK_OK(qou_preset_names(&names));
    CHECK(names != NULL);
    CHECK(strstr(names, "joint-spxvix-2017") != NULL);
    qou_string_free(names);
}

static void test_error_reporting(void) {
    const double alpha[5] = {0.0004, 0.0046, 0.0, 0.0096, 0.0};
    qou_params* p = NULL;
    CHECK(qou_params_create(31.8, 0.659, 0.964, 1.5, alpha, 5, 0, &p) ==
          QOU_INVALID_INPUT);
    CHECK(p == NULL);
    CHECK(strstr(qou_last_error(), "rho") != NULL);

    qou_mc_config mc;
    CHECK(qou_mc_config_from_json("{ not json", &mc) == QOU_INVALID_INPUT);
    CHECK(qou_last_error()[0] != '\0');
}

static void test_params_and_curve(void) {
    qou_params* p = NULL;
    CHECK_OK(qou_params_preset("joint-spxvix-2017", &p));
    double lx, ly, th, rho, alpha[6];
    int safe = 0;
    CHECK_OK(qou_params_get(p, &lx, &ly, &th, &rho, alpha, &safe));
    CHECK(lx == 31.8);
    CHECK(ly == 0.659);
    CHECK(th == 0.964);
    CHECK(rho == -0.765);
    CHECK(alpha[5] == 1.0);
    CHECK(safe == 1);

    qou_curve* flat = NULL;
    CHECK_OK(qou_curve_flat(0.03, &flat));
    double v = 0.0;
    CHECK_OK(qou_curve_value(flat, 0.7, &v));
    CHECK(v == 0.03);
    CHECK_OK(qou_curve_integral(flat, 0.0, 2.0, &v));
    CHECK(fabs(v - 0.06) < 1e-15);

    /* E[sigma_s^2] from today with the factors at the origin is xi0(s). */
    CHECK_OK(qou_forward_variance(p, flat, 0.0, 0.5, 0.0, 0.0, &v));
    CHECK(fabs(v - 0.03) < 1e-12);

    /* JSON document round-trip preserves the parameters bitwise. */
    char* json = NULL;
    CHECK_OK(qou_model_to_json(p, flat, &json));
    qou_params* p2 = NULL;
    qou_curve* c2 = NULL;
    CHECK_OK(qou_model_from_json(json, &p2, &c2));
    double lx2, ly2, th2, rho2, alpha2[6];
    CHECK_OK(qou_params_get(p2, &lx2, &ly2, &th2, &rho2, alpha2, NULL));
    CHECK(lx2 == lx && ly2 == ly && th2 == th && rho2 == rho);
    for (int k = 0; k < 6; ++k) CHECK(alpha2[k] == alpha[k]);
    CHECK_OK(qou_curve_value(c2, 0.7, &v));
    CHECK(v == 0.03);
    CHECK(qou_model_from_json("{ not json", &p2, &c2) == QOU_INVALID_INPUT);
    qou_string_free(json);
    qou_curve_free(c2);
    qou_params_free(p2);
    qou_curve_free(flat);
    qou_params_free(p);
}

static void test_bootstrap(void) {
    const double mats[2] = {0.5, 1.0};
    const double totals[2] = {0.015, 0.035};
    qou_curve* c = NULL;
    CHECK_OK(qou_bootstrap_forward_variance(mats, totals, 2, &c));
    size_t n = 0;
    CHECK_OK(qou_curve_size(c, &n));
    CHECK(n == 2);
    double knots[2], values[2];
    CHECK_OK(qou_curve_get(c, knots, values));
    CHECK(fabs(values[0] - 0.03) < 1e-15 && fabs(values[1] - 0.04) < 1e-15);
    qou_curve_free(c);

    const double bad_totals[2] = {0.02, 0.015};
    CHECK(qou_bootstrap_forward_variance(mats, bad_totals, 2, &c) ==
          QOU_INVALID_INPUT);
    CHECK(strstr(qou_last_error(), "calendar") != NULL);
}

static void test_vix_pricing(void) {
    qou_params* p = NULL;
    qou_curve* c = NULL;
    CHECK_OK(qou_params_preset("joint-spxvix-2017", &p));
    CHECK_OK(qou_curve_flat(0.03, &c));

    qou_vix_poly* poly = NULL;
    CHECK_OK(qou_vix_poly_build(p, c, 1.0 / 12, 64, &poly));
    double at_origin = 0.0;
    CHECK_OK(qou_vix_value(poly, 0.0, 0.0, &at_origin));
    CHECK(at_origin > 5.0 && at_origin < 40.0);

    qou_grid* grid = NULL;
    CHECK_OK(qou_grid_load(QOU_GRID_GAUSS_HERMITE, 256, NULL, 0, NULL, &grid));
    size_t n_nodes = 0;
    CHECK_OK(qou_grid_size(grid, &n_nodes));
    CHECK(n_nodes == 256);

    double future = 0.0;
    CHECK_OK(qou_vix_future(poly, grid, &future));
    CHECK(future > 10.0 && future < 30.0);

    double call = 0.0;
    CHECK_OK(qou_vix_call(poly, grid, future, &call));
    CHECK(call > 0.0 && call < future);

    const double strikes[3] = {0.9 * future, future, 1.1 * future};
    double ivs[3];
    CHECK_OK(qou_vix_smile(poly, grid, strikes, 3, ivs));
    for (int i = 0; i < 3; ++i) CHECK(ivs[i] > 0.05 && ivs[i] < 3.0);

    /* The pseudo-random grid is the Monte Carlo cross-check of cubature. */
    qou_grid* mc_grid = NULL;
    CHECK_OK(qou_grid_mc(20000, 3, &mc_grid));
    double future_mc = 0.0;
    CHECK_OK(qou_vix_future(poly, mc_grid, &future_mc));
    CHECK(fabs(future_mc - future) < 0.2);

    qou_grid_free(mc_grid);
    qou_grid_free(grid);
    qou_vix_poly_free(poly);
    qou_curve_free(c);
    qou_params_free(p);
}

static void test_black_scholes(void) {
    double price = 0.0;
    CHECK_OK(qou_bs_price(1.0, 1.0, 0.25, 0.2, 1, &price));
    double vol = 0.0;
    CHECK_OK(qou_implied_vol(price, 1.0, 1.0, 0.25, 1, &vol));
    CHECK(fabs(vol - 0.2) < 1e-10);
    CHECK(qou_implied_vol(2.0, 1.0, 1.0, 0.25, 1, &vol) == QOU_INVALID_INPUT);
}

static void test_spx_smile(void) {
    qou_params* p = NULL;
    qou_curve* c = NULL;
    CHECK_OK(qou_params_preset("joint-spxvix-2017", &p));
    CHECK_OK(qou_curve_flat(0.03, &c));

    qou_mc_config mc;
    CHECK_OK(qou_mc_config_default(&mc));
    CHECK(mc.n_paths > 0 && mc.steps_per_year > 0);
    mc.n_paths = 8192;
    mc.steps_per_year = 126;
    mc.seed = 7;

    const double maturities[1] = {0.25};
    const double strikes[3] = {0.95, 1.0, 1.05};
    const size_t per_maturity[1] = {3};
    qou_smile* smile = NULL;
    CHECK_OK(qou_spx_smile(p, c, maturities, 1, strikes, per_maturity, &mc, &smile));
    size_t n = 0;
    CHECK_OK(qou_smile_size(smile, &n));
    CHECK(n == 3);
    for (size_t i = 0; i < n; ++i) {
        double maturity, strike, iv, iv_se;
        int ok = 0;
        CHECK_OK(qou_smile_point(smile, i, &maturity, &strike, &iv, &iv_se, NULL,
                                 NULL, &ok));
        CHECK(maturity == 0.25);
        CHECK(strike == strikes[i]);
        CHECK(ok == 1);
        CHECK(iv > 0.08 && iv < 0.35);
        CHECK(iv_se > 0.0);
    }
    double forward = 0.0;
    CHECK_OK(qou_smile_forward(smile, 0, &forward));
    CHECK(fabs(forward - 1.0) < 0.05);
    qou_smile_free(smile);
    qou_curve_free(c);
    qou_params_free(p);
}

static void test_ssr(void) {
    qou_params* p = NULL;
    qou_curve* c = NULL;
    CHECK_OK(qou_params_preset("joint-spxvix-ssr-2017", &p));
    CHECK_OK(qou_curve_flat(0.03, &c));

    qou_mc_config mc;
    CHECK_OK(qou_mc_config_default(&mc));
    mc.n_paths = 2048;
    mc.steps_per_year = 252;
    mc.seed = 11;

    const double maturities[1] = {1.0 / 12};
    qou_ssr_report* report = NULL;
    CHECK_OK(qou_model_ssr(p, c, maturities, 1, 1e-3, &mc, &report));
    size_t n = 0;
    CHECK_OK(qou_ssr_size(report, &n));
    CHECK(n == 1);
    double maturity, ssr, se, atm_iv, atm_skew, eps, half;
    CHECK_OK(qou_ssr_point(report, 0, &maturity, &ssr, &se, &atm_iv, &atm_skew,
                           &eps, &half));
    CHECK(maturity == 1.0 / 12);
    CHECK(ssr > 0.0 && ssr < 5.0);
    CHECK(se > 0.0);
    CHECK(atm_iv > 0.05 && atm_iv < 0.5);
    CHECK(atm_skew < 0.0);
    CHECK(eps == 1e-3);
    CHECK(isfinite(half));
    double sigma0 = 0.0;
    CHECK_OK(qou_ssr_sigma0(report, &sigma0));
    CHECK(fabs(sigma0 - sqrt(0.03)) < 1e-12);
    qou_ssr_report_free(report);
    qou_curve_free(c);
    qou_params_free(p);
}

static void test_empirical_ssr(void) {
    /* Exact planted relationship: every vol change is `slope` times the
     * skew-weighted spot move, so every window regresses to `slope`. */
    enum { N = 150 };
    const int window = 120;
    const double slope = 1.5;
    int64_t dates[N];
    double iv[N], skew[N], log_spot[N];
    double ls = 0.0, v = 0.2;
    for (int t = 0; t < N; ++t) {
        dates[t] = t;
        const double step = 0.01 * sin(12.9898 * (t + 1));
        if (t > 0) {
            v += slope * skew[t - 1] * step;
            ls += step;
        }
        log_spot[t] = ls;
        iv[t] = v;
        skew[t] = -2.0 + 0.3 * sin(3.7 * t);
    }
    int64_t out_dates[N];
    double out_values[N];
    int out_used[N], out_ok[N];
    size_t out_n = 0;
    CHECK_OK(qou_empirical_ssr(dates, iv, skew, log_spot, N, window, 2.0, 10,
                               out_dates, out_values, out_used, out_ok, &out_n));
    CHECK(out_n == N - window);
    for (size_t i = 0; i < out_n; ++i) {
        CHECK(out_ok[i] == 1);
        CHECK(fabs(out_values[i] - slope) < 1e-9);
        CHECK(out_used[i] >= 10);
    }

    /* Series shorter than the window yields no points. */
    CHECK_OK(qou_empirical_ssr(dates, iv, skew, log_spot, 50, window, 2.0, 10,
                               out_dates, out_values, out_used, out_ok, &out_n));
    CHECK(out_n == 0);
}

static void test_market_and_estimators(void) {
    qou_params* p = NULL;
    qou_curve* c = NULL;
    CHECK_OK(qou_params_preset("stylized-facts-2024", &p));
    CHECK_OK(qou_curve_flat(0.03, &c));

    enum { DAYS = 252, PPD = 13 };
    qou_market* market = NULL;
    CHECK_OK(qou_market_simulate(p, c, DAYS, PPD, 5, 252, &market));
    int n_days = 0, ppd = 0;
    CHECK_OK(qou_market_dims(market, &n_days, &ppd));
    CHECK(n_days == DAYS && ppd == PPD);

    static double intraday[DAYS * PPD];
    CHECK_OK(qou_market_intraday(market, intraday));
    static int64_t dates[DAYS];
    static double returns[DAYS], spot_vol[DAYS];
    CHECK_OK(qou_market_daily(market, dates, returns, spot_vol));
    /* The vol polynomial is signed at this preset, so spot vol can dip below
     * zero on occasional days; it starts positive because p(0) > 0. */
    CHECK(fabs(spot_vol[0] - sqrt(0.03)) < 1e-12);
    for (int t = 0; t < DAYS; ++t) CHECK(isfinite(spot_vol[t]));

    /* Daily return = sum of the day's intraday returns. */
    double day0 = 0.0;
    for (int j = 0; j < PPD; ++j) day0 += intraday[j];
    CHECK(fabs(day0 - returns[0]) < 1e-14);

    static double rv[DAYS];
    CHECK_OK(qou_realized_vol(intraday, DAYS, PPD, PPD * 252.0, rv));
    for (int t = 0; t < DAYS; ++t) CHECK(rv[t] >= 0.0);

    double acf5[6];
    CHECK_OK(qou_acf(returns, DAYS, 5, acf5));
    CHECK(fabs(acf5[0] - 1.0) < 1e-12);
    for (int k = 1; k <= 5; ++k) CHECK(fabs(acf5[k]) < 1.0);

    const int horizons[2] = {1, 5};
    double skewness[2], exkurt[2];
    int n_obs[2], ok[2];
    CHECK_OK(qou_moment_term_structure(returns, DAYS, horizons, 2, skewness,
                                       exkurt, n_obs, ok));
    CHECK(ok[0] == 1 && ok[1] == 1);
    CHECK(n_obs[0] == DAYS && n_obs[1] == DAYS / 5);
    CHECK(isfinite(skewness[0]) && isfinite(exkurt[0]));

    static double variance[DAYS];
    for (int t = 0; t < DAYS; ++t) variance[t] = rv[t] * rv[t];
    double lev[7];
    CHECK_OK(qou_leverage(dates, returns, DAYS, dates, variance, DAYS, 3, lev));
    for (int i = 0; i < 7; ++i) CHECK(isfinite(lev[i]));

    double zfwd[3], zbwd[3], z[3], rho_zero = 0.0;
    CHECK_OK(qou_zumbach(dates, rv, DAYS, dates, returns, DAYS, 3, zfwd, zbwd, z,
                         &rho_zero));
    for (int i = 0; i < 3; ++i) {
        CHECK(fabs(zfwd[i]) <= 1.0 && fabs(zbwd[i]) <= 1.0);
        CHECK(isfinite(z[i]));
    }
    CHECK(fabs(rho_zero) <= 1.0);

    qou_market_free(market);
    qou_curve_free(c);
    qou_params_free(p);
}

struct mean_ctx {
    const double* x;
};

static void mean_statistic(void* ctx, const int64_t* day_indices, size_t n_days,
                           double* out) {
    const struct mean_ctx* mc = (const struct mean_ctx*)ctx;
    double acc = 0.0;
    for (size_t i = 0; i < n_days; ++i) acc += mc->x[day_indices[i]];
    out[0] = acc / (double)n_days;
}

static void test_bootstrap_ci(void) {
    enum { N = 100 };
    double x[N];
    double mean = 0.0;
    for (int t = 0; t < N; ++t) {
        x[t] = sin(0.7 * t);
        mean += x[t];
    }
    mean /= N;
    struct mean_ctx ctx = {x};
    double lo = 0.0, hi = 0.0;
    CHECK_OK(qou_block_bootstrap_ci(N, 200, 20, 43, mean_statistic, &ctx, 1, &lo, &hi));
    CHECK(lo <= mean && mean <= hi);
    double lo2 = 0.0, hi2 = 0.0;
    CHECK_OK(qou_block_bootstrap_ci(N, 200, 20, 43, mean_statistic, &ctx, 1, &lo2, &hi2));
    CHECK(lo == lo2 && hi == hi2);
}

static void test_calibrate(void) {
    qou_params* p = NULL;
    qou_curve* c = NULL;
    CHECK_OK(qou_params_preset("joint-spxvix-2017", &p));
    CHECK_OK(qou_curve_flat(0.03, &c));

    /* Corridors generated by the library itself around the preset's smile:
     * starting the fit at the same point must land inside every corridor. */
    qou_vix_poly* poly = NULL;
    CHECK_OK(qou_vix_poly_build(p, c, 0.25, 64, &poly));
    qou_grid* grid = NULL;
    CHECK_OK(qou_grid_load(QOU_GRID_GAUSS_HERMITE, 256, NULL, 0, NULL, &grid));
    double future = 0.0;
    CHECK_OK(qou_vix_future(poly, grid, &future));

    double strikes[3] = {0.9 * future, future, 1.1 * future};
    double ivs[3];
    CHECK_OK(qou_vix_smile(poly, grid, strikes, 3, ivs));

    double maturities[3], bid[3], ask[3];
    for (int i = 0; i < 3; ++i) {
        maturities[i] = 0.25;
        bid[i] = ivs[i] - 0.005;
        ask[i] = ivs[i] + 0.005;
    }

    const char* settings =
        "{\"budget\": 10, \"mask\": {\"theta\": false, \"rho\": false,"
        " \"alpha\": [false, false, false, false, false]}}";
    qou_calib* result = NULL;
    CHECK_OK(qou_calibrate(p, c, NULL, NULL, NULL, NULL, 0, maturities, strikes,
                           bid, ask, 3, NULL, NULL, 0, NULL, NULL, 0, settings,
                           &result));
    double total = -1.0, vix_block = -1.0;
    CHECK_OK(qou_calib_loss(result, &total, NULL, &vix_block, NULL, NULL));
    CHECK(total == 0.0);
    CHECK(vix_block == 0.0);
    int n_evals = 0, restarts = -1;
    CHECK_OK(qou_calib_stats(result, &n_evals, &restarts));
    CHECK(n_evals >= 3 && n_evals <= 10);
    CHECK(restarts >= 0);

    qou_params* fitted = NULL;
    qou_curve* fitted_curve = NULL;
    CHECK_OK(qou_calib_params(result, &fitted, &fitted_curve));
    double lx = 0.0;
    CHECK_OK(qou_params_get(fitted, &lx, NULL, NULL, NULL, NULL, NULL));
    CHECK(fabs(lx - 31.8) < 1e-9);

    char* json = NULL;
    CHECK_OK(qou_calib_to_json(result, &json));
    CHECK(strstr(json, "loss") != NULL);
    qou_string_free(json);

    qou_params_free(fitted);
    qou_curve_free(fitted_curve);
    qou_calib_free(result);
    qou_grid_free(grid);
    qou_vix_poly_free(poly);
    qou_curve_free(c);
    qou_params_free(p);
}

int main(void) {
    CHECK_OK(qou_set_max_threads(1));
    test_version_and_presets();
    test_error_reporting();
    test_params_and_curve();
    test_bootstrap();
    test_vix_pricing();
    test_black_scholes();
    test_spx_smile();
    test_ssr();
    test_empirical_ssr();
    test_market_and_estimators();
    test_bootstrap_ci();
    test_calibrate();
    if (failures == 0) {
        printf("test_capi: all checks passed\n");
        return 0;
    }
    fprintf(stderr, "test_capi: %d check(s) failed\n", failures);
    return 1;
}
