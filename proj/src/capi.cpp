#include "quintic/quintic.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "quintic/calibration.hpp"
#include "quintic/cubature.hpp"
#include "quintic/errors.hpp"
#include "quintic/implied_vol.hpp"
#include "quintic/json_io.hpp"
#include "quintic/mc.hpp"
#include "quintic/model.hpp"
#include "quintic/rng.hpp"
#include "quintic/ssr.hpp"
#include "quintic/stylized.hpp"
#include "quintic/threading.hpp"
#include "quintic/vix.hpp"

// Handle types: thin value wrappers, allocated with new and returned as
// opaque pointers.
struct qou_params {
    quintic::ModelParams v;
};
struct qou_curve {
    quintic::ForwardVarianceCurve v = quintic::ForwardVarianceCurve::flat(0.04);
};
struct qou_vix_poly {
    quintic::VixPolynomial v;
};
struct qou_grid {
    quintic::GaussianGrid v;
};
struct qou_smile {
    quintic::SmileReport v;
};
struct qou_ssr_report {
    quintic::SsrReport v;
};
struct qou_market {
    quintic::MarketSeries v;
};
struct qou_calib {
    quintic::CalibrationResult v;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
qou_status guarded(Fn&& fn) {
    try {
        fn();
        return QOU_OK;
    } catch (const quintic::InvalidInput& e) {
        g_last_error = e.what();
        return QOU_INVALID_INPUT;
    } catch (const quintic::NumericFailure& e) {
        g_last_error = e.what();
        return QOU_NUMERIC_FAILURE;
    } catch (const quintic::IoError& e) {
        g_last_error = e.what();
        return QOU_IO_ERROR;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QOU_INTERNAL_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return QOU_INTERNAL_ERROR;
    }
}

qou_status fail_invalid(const char* message) {
    g_last_error = message;
    return QOU_INVALID_INPUT;
}

char* copy_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

quintic::McConfig to_cpp(const qou_mc_config& c) {
    quintic::McConfig out;
    out.n_paths = c.n_paths;
    out.steps_per_year = c.steps_per_year;
    out.seed = c.seed;
    out.antithetic = c.antithetic != 0;
    out.estimator = c.estimator == QOU_ESTIMATOR_PLAIN ? quintic::Estimator::Plain
                                                       : quintic::Estimator::Conditional;
    return out;
}

}  // namespace

extern "C" {

const char* qou_version(void) { return "0.1.0"; }

const char* qou_last_error(void) { return g_last_error.c_str(); }

void qou_string_free(char* s) { delete[] s; }

qou_status qou_set_max_threads(int n) {
    return guarded([&] { quintic::set_max_threads(n); });
}

/* ------------------------------------------------------------------ */

qou_status qou_params_create(double lambda_x, double lambda_y, double theta, double rho,
                             const double* alpha, size_t n_alpha,
                             int require_martingale_safe, qou_params** out) {
    if (!out || !alpha) return fail_invalid("qou_params_create: NULL argument");
    return guarded([&] {
        quintic::ModelParams params;
        if (n_alpha == 6) {
            std::array<double, 6> a;
            std::copy(alpha, alpha + 6, a.begin());
            params = quintic::make_params(lambda_x, lambda_y, theta, rho, a,
                                          require_martingale_safe != 0);
        } else if (n_alpha == 5) {
            std::array<double, 5> a;
            std::copy(alpha, alpha + 5, a.begin());
            params = quintic::make_params(lambda_x, lambda_y, theta, rho, a,
                                          require_martingale_safe != 0);
        } else {
            throw quintic::InvalidInput("qou_params_create: alpha needs 5 or 6 entries");
        }
        *out = new qou_params{params};
    });
}

qou_status qou_params_preset(const char* name, qou_params** out) {
    if (!out || !name) return fail_invalid("qou_params_preset: NULL argument");
    return guarded([&] { *out = new qou_params{quintic::preset_params(name)}; });
}

qou_status qou_preset_names(char** out_json) {
    if (!out_json) return fail_invalid("qou_preset_names: NULL argument");
    return guarded([&] {
        std::string json = "[";
        bool first = true;
        for (const std::string& name : quintic::preset_names()) {
            if (!first) json += ", ";
            json += "\"" + name + "\"";
            first = false;
        }
        json += "]";
        *out_json = copy_string(json);
    });
}

void qou_params_free(qou_params* p) { delete p; }

qou_status qou_params_get(const qou_params* p, double* lambda_x, double* lambda_y,
                          double* theta, double* rho, double alpha[6],
                          int* martingale_safe) {
    if (!p) return fail_invalid("qou_params_get: NULL handle");
    if (lambda_x) *lambda_x = p->v.lambda_x;
    if (lambda_y) *lambda_y = p->v.lambda_y;
    if (theta) *theta = p->v.theta;
    if (rho) *rho = p->v.rho;
    if (alpha) std::copy(p->v.alpha.begin(), p->v.alpha.end(), alpha);
    if (martingale_safe) *martingale_safe = p->v.martingale_safe ? 1 : 0;
    return QOU_OK;
}

qou_status qou_curve_create(const double* knots, const double* values, size_t n,
                            qou_curve** out) {
    if (!out || !knots || !values) return fail_invalid("qou_curve_create: NULL argument");
    return guarded([&] {
        *out = new qou_curve{quintic::ForwardVarianceCurve(
            std::vector<double>(knots, knots + n), std::vector<double>(values, values + n))};
    });
}

qou_status qou_curve_flat(double value, qou_curve** out) {
    if (!out) return fail_invalid("qou_curve_flat: NULL argument");
    return guarded([&] { *out = new qou_curve{quintic::ForwardVarianceCurve::flat(value)}; });
}

void qou_curve_free(qou_curve* c) { delete c; }

qou_status qou_curve_size(const qou_curve* c, size_t* n) {
    if (!c || !n) return fail_invalid("qou_curve_size: NULL argument");
    *n = c->v.knots().size();
    return QOU_OK;
}

qou_status qou_curve_get(const qou_curve* c, double* knots, double* values) {
    if (!c) return fail_invalid("qou_curve_get: NULL handle");
    if (knots) std::copy(c->v.knots().begin(), c->v.knots().end(), knots);
    if (values) std::copy(c->v.values().begin(), c->v.values().end(), values);
    return QOU_OK;
}

qou_status qou_curve_value(const qou_curve* c, double t, double* out) {
    if (!c || !out) return fail_invalid("qou_curve_value: NULL argument");
    return guarded([&] { *out = c->v.value(t); });
}

qou_status qou_curve_integral(const qou_curve* c, double a, double b, double* out) {
    if (!c || !out) return fail_invalid("qou_curve_integral: NULL argument");
    return guarded([&] { *out = c->v.integral(a, b); });
}

qou_status qou_bootstrap_forward_variance(const double* maturities,
                                          const double* total_variance, size_t n,
                                          qou_curve** out) {
    if (!out || !maturities || !total_variance)
        return fail_invalid("qou_bootstrap_forward_variance: NULL argument");
    return guarded([&] {
        std::vector<quintic::VarswapPoint> points(n);
        for (size_t i = 0; i < n; ++i)
            points[i] = {maturities[i], total_variance[i]};
        *out = new qou_curve{quintic::bootstrap_forward_variance(points)};
    });
}

qou_status qou_model_from_json(const char* text, qou_params** params, qou_curve** curve) {
    if (!text || !params || !curve) return fail_invalid("qou_model_from_json: NULL argument");
    return guarded([&] {
        const quintic::ModelDocument doc = quintic::model_from_json(text);
        *params = new qou_params{doc.params};
        *curve = new qou_curve{doc.curve};
    });
}

qou_status qou_model_to_json(const qou_params* params, const qou_curve* curve,
                             char** out_json) {
    if (!params || !curve || !out_json)
        return fail_invalid("qou_model_to_json: NULL argument");
    return guarded([&] {
        *out_json = copy_string(quintic::model_to_json({params->v, curve->v}));
    });
}

qou_status qou_forward_variance(const qou_params* p, const qou_curve* c, double t,
                                double s, double x, double y, double* out) {
    if (!p || !c || !out) return fail_invalid("qou_forward_variance: NULL argument");
    return guarded([&] { *out = quintic::forward_variance(p->v, c->v, t, s, x, y); });
}

/* ------------------------------------------------------------------ */

qou_status qou_mc_config_default(qou_mc_config* out) {
    if (!out) return fail_invalid("qou_mc_config_default: NULL argument");
    const quintic::McConfig d;
    out->n_paths = d.n_paths;
    out->steps_per_year = d.steps_per_year;
    out->seed = d.seed;
    out->antithetic = d.antithetic ? 1 : 0;
    out->estimator = d.estimator == quintic::Estimator::Plain ? QOU_ESTIMATOR_PLAIN
                                                              : QOU_ESTIMATOR_CONDITIONAL;
    return QOU_OK;
}

qou_status qou_mc_config_from_json(const char* text, qou_mc_config* out) {
    if (!text || !out) return fail_invalid("qou_mc_config_from_json: NULL argument");
    return guarded([&] {
        const quintic::McConfig c = quintic::mc_config_from_json(text);
        out->n_paths = c.n_paths;
        out->steps_per_year = c.steps_per_year;
        out->seed = c.seed;
        out->antithetic = c.antithetic ? 1 : 0;
        out->estimator = c.estimator == quintic::Estimator::Plain
                             ? QOU_ESTIMATOR_PLAIN
                             : QOU_ESTIMATOR_CONDITIONAL;
    });
}

/* ------------------------------------------------------------------ */

qou_status qou_vix_poly_build(const qou_params* p, const qou_curve* c, double t,
                              int quad_nodes, qou_vix_poly** out) {
    if (!p || !c || !out) return fail_invalid("qou_vix_poly_build: NULL argument");
    return guarded([&] {
        *out = new qou_vix_poly{quintic::build_vix_polynomial(p->v, c->v, t, quad_nodes)};
    });
}

void qou_vix_poly_free(qou_vix_poly* poly) { delete poly; }

qou_status qou_vix_poly_to_json(const qou_vix_poly* poly, char** out_json) {
    if (!poly || !out_json) return fail_invalid("qou_vix_poly_to_json: NULL argument");
    return guarded([&] { *out_json = copy_string(quintic::vix_polynomial_to_json(poly->v)); });
}

qou_status qou_vix_value(const qou_vix_poly* poly, double x, double y, double* out) {
    if (!poly || !out) return fail_invalid("qou_vix_value: NULL argument");
    return guarded([&] { *out = std::sqrt(quintic::vix_squared(poly->v, x, y)); });
}

qou_status qou_grid_load(int kind, int size, const char* data_dir, int allow_fallback,
                         int* fell_back, qou_grid** out) {
    if (!out) return fail_invalid("qou_grid_load: NULL argument");
    return guarded([&] {
        const quintic::GridKind k = kind == QOU_GRID_QUANTIZER
                                        ? quintic::GridKind::Quantizer
                                        : quintic::GridKind::GaussHermite;
        int requested = size;
        if (k == quintic::GridKind::GaussHermite) {
            // Round up to the next tensor square so any target count works.
            int order = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(size))));
            requested = order * order;
        }
        const std::string dir = data_dir ? data_dir : "";
        bool fell = false;
        quintic::GaussianGrid grid =
            allow_fallback ? quintic::load_grid_or_fallback(k, requested, &fell, dir)
                           : quintic::load_grid(k, requested, dir);
        if (fell_back) *fell_back = fell ? 1 : 0;
        *out = new qou_grid{std::move(grid)};
    });
}

qou_status qou_grid_mc(int64_t n, uint64_t seed, qou_grid** out) {
    if (!out) return fail_invalid("qou_grid_mc: NULL argument");
    if (n <= 0) return fail_invalid("qou_grid_mc: n must be positive");
    return guarded([&] {
        quintic::GaussianGrid grid;
        grid.kind = quintic::GridKind::GaussHermite;  // closest label: synthetic nodes
        grid.x.resize(static_cast<size_t>(n));
        grid.y.resize(static_cast<size_t>(n));
        grid.w.assign(static_cast<size_t>(n), 1.0 / static_cast<double>(n));
        for (int64_t i = 0; i < n; ++i) {
            grid.x[static_cast<size_t>(i)] =
                quintic::normal_draw(seed, static_cast<std::uint64_t>(i), 0, 0);
            grid.y[static_cast<size_t>(i)] =
                quintic::normal_draw(seed, static_cast<std::uint64_t>(i), 0, 1);
        }
        *out = new qou_grid{std::move(grid)};
    });
}

void qou_grid_free(qou_grid* g) { delete g; }

qou_status qou_grid_size(const qou_grid* g, size_t* n) {
    if (!g || !n) return fail_invalid("qou_grid_size: NULL argument");
    *n = g->v.size();
    return QOU_OK;
}

qou_status qou_vix_future(const qou_vix_poly* poly, const qou_grid* grid, double* out) {
    if (!poly || !grid || !out) return fail_invalid("qou_vix_future: NULL argument");
    return guarded([&] { *out = quintic::vix_future(poly->v, grid->v); });
}

qou_status qou_vix_call(const qou_vix_poly* poly, const qou_grid* grid, double strike,
                        double* out) {
    if (!poly || !grid || !out) return fail_invalid("qou_vix_call: NULL argument");
    return guarded([&] { *out = quintic::vix_call(poly->v, grid->v, strike); });
}

qou_status qou_vix_smile(const qou_vix_poly* poly, const qou_grid* grid,
                         const double* strikes, size_t n, double* out_iv) {
    if (!poly || !grid || !strikes || !out_iv)
        return fail_invalid("qou_vix_smile: NULL argument");
    return guarded([&] {
        const std::vector<double> ivs =
            quintic::vix_smile(poly->v, grid->v, std::span<const double>(strikes, n));
        std::copy(ivs.begin(), ivs.end(), out_iv);
    });
}

/* ------------------------------------------------------------------ */

qou_status qou_bs_price(double forward, double strike, double maturity, double vol,
                        int is_call, double* out) {
    if (!out) return fail_invalid("qou_bs_price: NULL argument");
    return guarded(
        [&] { *out = quintic::bs_price(forward, strike, maturity, vol, is_call != 0); });
}

qou_status qou_implied_vol(double price, double forward, double strike, double maturity,
                           int is_call, double* out) {
    if (!out) return fail_invalid("qou_implied_vol: NULL argument");
    return guarded(
        [&] { *out = quintic::implied_vol(price, forward, strike, maturity, is_call != 0); });
}

/* ------------------------------------------------------------------ */

qou_status qou_spx_smile(const qou_params* p, const qou_curve* c, const double* maturities,
                         size_t n_maturities, const double* strikes,
                         const size_t* n_strikes, const qou_mc_config* config,
                         qou_smile** out) {
    if (!p || !c || !maturities || !strikes || !n_strikes || !config || !out)
        return fail_invalid("qou_spx_smile: NULL argument");
    return guarded([&] {
        std::vector<double> mats(maturities, maturities + n_maturities);
        std::vector<std::vector<double>> per_mat;
        size_t offset = 0;
        for (size_t i = 0; i < n_maturities; ++i) {
            per_mat.emplace_back(strikes + offset, strikes + offset + n_strikes[i]);
            offset += n_strikes[i];
        }
        *out = new qou_smile{quintic::spx_smile(p->v, c->v, mats, per_mat, to_cpp(*config))};
    });
}

void qou_smile_free(qou_smile* s) { delete s; }

qou_status qou_smile_size(const qou_smile* s, size_t* n_points) {
    if (!s || !n_points) return fail_invalid("qou_smile_size: NULL argument");
    *n_points = s->v.points.size();
    return QOU_OK;
}

qou_status qou_smile_point(const qou_smile* s, size_t i, double* maturity, double* strike,
                           double* iv, double* iv_se, double* price, double* price_se,
                           int* ok) {
    if (!s) return fail_invalid("qou_smile_point: NULL handle");
    if (i >= s->v.points.size()) return fail_invalid("qou_smile_point: index out of range");
    const quintic::SmilePoint& point = s->v.points[i];
    if (maturity) *maturity = point.maturity;
    if (strike) *strike = point.strike;
    if (iv) *iv = point.iv;
    if (iv_se) *iv_se = point.iv_se;
    if (price) *price = point.price;
    if (price_se) *price_se = point.price_se;
    if (ok) *ok = point.ok ? 1 : 0;
    return QOU_OK;
}

qou_status qou_smile_forward(const qou_smile* s, size_t maturity_index, double* out) {
    if (!s || !out) return fail_invalid("qou_smile_forward: NULL argument");
    if (maturity_index >= s->v.forwards.size())
        return fail_invalid("qou_smile_forward: index out of range");
    *out = s->v.forwards[maturity_index].value;
    return QOU_OK;
}

/* ------------------------------------------------------------------ */

qou_status qou_model_ssr(const qou_params* p, const qou_curve* c, const double* maturities,
                         size_t n, double epsilon, const qou_mc_config* config,
                         qou_ssr_report** out) {
    if (!p || !c || !maturities || !config || !out)
        return fail_invalid("qou_model_ssr: NULL argument");
    return guarded([&] {
        *out = new qou_ssr_report{quintic::model_ssr(
            p->v, c->v, std::span<const double>(maturities, n), epsilon, to_cpp(*config))};
    });
}

void qou_ssr_report_free(qou_ssr_report* r) { delete r; }

qou_status qou_ssr_size(const qou_ssr_report* r, size_t* n_points) {
    if (!r || !n_points) return fail_invalid("qou_ssr_size: NULL argument");
    *n_points = r->v.points.size();
    return QOU_OK;
}

qou_status qou_ssr_point(const qou_ssr_report* r, size_t i, double* maturity, double* ssr,
                         double* stderr_out, double* atm_iv, double* atm_skew,
                         double* epsilon, double* ssr_half_epsilon) {
    if (!r) return fail_invalid("qou_ssr_point: NULL handle");
    if (i >= r->v.points.size()) return fail_invalid("qou_ssr_point: index out of range");
    const quintic::SsrPoint& point = r->v.points[i];
    if (maturity) *maturity = point.maturity;
    if (ssr) *ssr = point.ssr;
    if (stderr_out) *stderr_out = point.se;
    if (atm_iv) *atm_iv = point.atm_iv;
    if (atm_skew) *atm_skew = point.atm_skew;
    if (epsilon) *epsilon = point.epsilon;
    if (ssr_half_epsilon) *ssr_half_epsilon = point.ssr_half_epsilon;
    return QOU_OK;
}

qou_status qou_ssr_sigma0(const qou_ssr_report* r, double* out) {
    if (!r || !out) return fail_invalid("qou_ssr_sigma0: NULL argument");
    *out = r->v.sigma0;
    return QOU_OK;
}

qou_status qou_empirical_ssr(const int64_t* dates, const double* atm_iv,
                             const double* atm_skew, const double* log_spot, size_t n,
                             int window, double outlier_sigmas, int min_obs,
                             int64_t* out_dates, double* out_values, int* out_n_used,
                             int* out_ok, size_t* out_n) {
    if (!dates || !atm_iv || !atm_skew || !log_spot || !out_n)
        return fail_invalid("qou_empirical_ssr: NULL argument");
    return guarded([&] {
        const std::vector<quintic::EmpiricalSsrPoint> points = quintic::empirical_ssr(
            std::span<const std::int64_t>(dates, n), std::span<const double>(atm_iv, n),
            std::span<const double>(atm_skew, n), std::span<const double>(log_spot, n),
            window, outlier_sigmas, min_obs);
        for (size_t i = 0; i < points.size(); ++i) {
            if (out_dates) out_dates[i] = points[i].date;
            if (out_values) out_values[i] = points[i].value;
            if (out_n_used) out_n_used[i] = points[i].n_used;
            if (out_ok) out_ok[i] = points[i].ok ? 1 : 0;
        }
        *out_n = points.size();
    });
}

/* ------------------------------------------------------------------ */

qou_status qou_market_simulate(const qou_params* p, const qou_curve* c, int n_days,
                               int periods_per_day, uint64_t seed,
                               int trading_days_per_year, qou_market** out) {
    if (!p || !c || !out) return fail_invalid("qou_market_simulate: NULL argument");
    return guarded([&] {
        *out = new qou_market{quintic::simulate_market_series(
            p->v, c->v, n_days, periods_per_day, seed, trading_days_per_year)};
    });
}

void qou_market_free(qou_market* m) { delete m; }

qou_status qou_market_dims(const qou_market* m, int* n_days, int* periods_per_day) {
    if (!m) return fail_invalid("qou_market_dims: NULL handle");
    if (n_days) *n_days = m->v.intraday.n_days();
    if (periods_per_day) *periods_per_day = m->v.intraday.periods_per_day;
    return QOU_OK;
}

qou_status qou_market_intraday(const qou_market* m, double* out) {
    if (!m || !out) return fail_invalid("qou_market_intraday: NULL argument");
    std::copy(m->v.intraday.r.begin(), m->v.intraday.r.end(), out);
    return QOU_OK;
}

qou_status qou_market_daily(const qou_market* m, int64_t* out_dates, double* out_returns,
                            double* out_spot_vol) {
    if (!m) return fail_invalid("qou_market_daily: NULL handle");
    if (out_dates)
        std::copy(m->v.daily_returns.dates.begin(), m->v.daily_returns.dates.end(),
                  out_dates);
    if (out_returns)
        std::copy(m->v.daily_returns.values.begin(), m->v.daily_returns.values.end(),
                  out_returns);
    if (out_spot_vol)
        std::copy(m->v.spot_vol.values.begin(), m->v.spot_vol.values.end(), out_spot_vol);
    return QOU_OK;
}

qou_status qou_realized_vol(const double* intraday, int n_days, int periods_per_day,
                            double periods_per_year, double* out) {
    if (!intraday || !out) return fail_invalid("qou_realized_vol: NULL argument");
    return guarded([&] {
        quintic::IntradayReturns returns;
        returns.periods_per_day = periods_per_day;
        returns.dates.resize(static_cast<size_t>(n_days));
        for (int d = 0; d < n_days; ++d) returns.dates[static_cast<size_t>(d)] = d;
        returns.r.assign(intraday,
                         intraday + static_cast<size_t>(n_days) *
                                        static_cast<size_t>(periods_per_day));
        const quintic::DatedSeries vols = quintic::realized_vol(returns, periods_per_year);
        std::copy(vols.values.begin(), vols.values.end(), out);
    });
}

qou_status qou_acf(const double* series, size_t n, int max_lag, double* out) {
    if (!series || !out) return fail_invalid("qou_acf: NULL argument");
    return guarded([&] {
        const std::vector<double> values =
            quintic::acf(std::span<const double>(series, n), max_lag);
        std::copy(values.begin(), values.end(), out);
    });
}

qou_status qou_moment_term_structure(const double* returns, size_t n, const int* horizons,
                                     size_t n_horizons, double* out_skewness,
                                     double* out_excess_kurtosis, int* out_n_obs,
                                     int* out_ok) {
    if (!returns || !horizons)
        return fail_invalid("qou_moment_term_structure: NULL argument");
    return guarded([&] {
        const quintic::MomentTermStructure ts = quintic::moment_term_structure(
            std::span<const double>(returns, n), std::span<const int>(horizons, n_horizons));
        for (size_t i = 0; i < n_horizons; ++i) {
            if (out_skewness) out_skewness[i] = 0.0;
            if (out_excess_kurtosis) out_excess_kurtosis[i] = 0.0;
            if (out_n_obs) out_n_obs[i] = 0;
            if (out_ok) out_ok[i] = 0;
        }
        for (const quintic::MomentRow& row : ts.rows) {
            for (size_t i = 0; i < n_horizons; ++i) {
                if (horizons[i] != row.horizon) continue;
                if (out_skewness) out_skewness[i] = row.skewness;
                if (out_excess_kurtosis) out_excess_kurtosis[i] = row.excess_kurtosis;
                if (out_n_obs) out_n_obs[i] = row.n_obs;
                if (out_ok) out_ok[i] = 1;
            }
        }
    });
}

qou_status qou_leverage(const int64_t* dates_r, const double* returns, size_t n_r,
                        const int64_t* dates_v, const double* variance, size_t n_v,
                        int max_lag, double* out) {
    if (!dates_r || !returns || !dates_v || !variance || !out)
        return fail_invalid("qou_leverage: NULL argument");
    return guarded([&] {
        quintic::DatedSeries r{std::vector<std::int64_t>(dates_r, dates_r + n_r),
                               std::vector<double>(returns, returns + n_r)};
        quintic::DatedSeries v{std::vector<std::int64_t>(dates_v, dates_v + n_v),
                               std::vector<double>(variance, variance + n_v)};
        const std::vector<double> values = quintic::leverage(r, v, max_lag);
        std::copy(values.begin(), values.end(), out);
    });
}

qou_status qou_zumbach(const int64_t* dates_vol, const double* vols, size_t n_vol,
                       const int64_t* dates_r, const double* returns, size_t n_r,
                       int max_lag, double* out_rho_fwd, double* out_rho_bwd,
                       double* out_z, double* out_rho_zero) {
    if (!dates_vol || !vols || !dates_r || !returns)
        return fail_invalid("qou_zumbach: NULL argument");
    return guarded([&] {
        quintic::DatedSeries v{std::vector<std::int64_t>(dates_vol, dates_vol + n_vol),
                               std::vector<double>(vols, vols + n_vol)};
        quintic::DatedSeries r{std::vector<std::int64_t>(dates_r, dates_r + n_r),
                               std::vector<double>(returns, returns + n_r)};
        const quintic::ZumbachReport report = quintic::zumbach(v, r, max_lag);
        if (out_rho_fwd)
            std::copy(report.rho_fwd.begin(), report.rho_fwd.end(), out_rho_fwd);
        if (out_rho_bwd)
            std::copy(report.rho_bwd.begin(), report.rho_bwd.end(), out_rho_bwd);
        if (out_z) std::copy(report.z.begin(), report.z.end(), out_z);
        if (out_rho_zero) *out_rho_zero = report.rho_zero;
    });
}

qou_status qou_block_bootstrap_ci(int n_days, int n_resamples, int block, uint64_t seed,
                                  qou_statistic_fn statistic, void* ctx, size_t dim,
                                  double* out_lo, double* out_hi) {
    if (!statistic || !out_lo || !out_hi)
        return fail_invalid("qou_block_bootstrap_ci: NULL argument");
    if (dim == 0) return fail_invalid("qou_block_bootstrap_ci: dim must be positive");
    return guarded([&] {
        const quintic::BootstrapBands bands = quintic::block_bootstrap_ci(
            n_days, n_resamples, block, seed,
            [&](std::span<const std::int64_t> days) {
                std::vector<double> out(dim, 0.0);
                statistic(ctx, days.data(), days.size(), out.data());
                return out;
            });
        std::copy(bands.lo.begin(), bands.lo.end(), out_lo);
        std::copy(bands.hi.begin(), bands.hi.end(), out_hi);
    });
}

/* ------------------------------------------------------------------ */

qou_status qou_calibrate(const qou_params* initial, const qou_curve* initial_curve,
                         const double* spx_maturity, const double* spx_strike,
                         const double* spx_bid, const double* spx_ask, size_t n_spx,
                         const double* vix_maturity, const double* vix_strike,
                         const double* vix_bid, const double* vix_ask, size_t n_vix,
                         const double* futures_maturity, const double* futures_price,
                         size_t n_futures, const double* varswap_maturity,
                         const double* varswap_total_variance, size_t n_varswaps,
                         const char* settings_json, qou_calib** out) {
    if (!initial || !initial_curve || !out) return fail_invalid("qou_calibrate: NULL argument");
    if (n_spx > 0 && (!spx_maturity || !spx_strike || !spx_bid || !spx_ask))
        return fail_invalid("qou_calibrate: NULL spx quote column");
    if (n_vix > 0 && (!vix_maturity || !vix_strike || !vix_bid || !vix_ask))
        return fail_invalid("qou_calibrate: NULL vix quote column");
    if (n_futures > 0 && (!futures_maturity || !futures_price))
        return fail_invalid("qou_calibrate: NULL futures column");
    if (n_varswaps > 0 && (!varswap_maturity || !varswap_total_variance))
        return fail_invalid("qou_calibrate: NULL varswap column");
    return guarded([&] {
        const quintic::CalibrationSettings settings =
            quintic::calibration_settings_from_json(settings_json ? settings_json : "");
        quintic::CalibrationTarget target;
        target.weights = settings.weights;
        target.ssr_lo = settings.ssr_lo;
        target.ssr_hi = settings.ssr_hi;
        for (size_t i = 0; i < n_spx; ++i)
            target.spx.quotes.push_back(
                {spx_maturity[i], spx_strike[i], spx_bid[i], spx_ask[i]});
        for (size_t i = 0; i < n_vix; ++i)
            target.vix.quotes.push_back(
                {vix_maturity[i], vix_strike[i], vix_bid[i], vix_ask[i]});
        for (size_t i = 0; i < n_futures; ++i)
            target.futures.push_back({futures_maturity[i], futures_price[i]});
        for (size_t i = 0; i < n_varswaps; ++i)
            target.varswaps.push_back({varswap_maturity[i], varswap_total_variance[i]});
        *out = new qou_calib{
            quintic::calibrate(target, initial->v, initial_curve->v, settings.config)};
    });
}

void qou_calib_free(qou_calib* r) { delete r; }

qou_status qou_calib_params(const qou_calib* r, qou_params** params, qou_curve** curve) {
    if (!r) return fail_invalid("qou_calib_params: NULL handle");
    if (params) *params = new qou_params{r->v.params};
    if (curve) *curve = new qou_curve{r->v.curve};
    return QOU_OK;
}

qou_status qou_calib_loss(const qou_calib* r, double* total, double* spx, double* vix,
                          double* futures, double* ssr) {
    if (!r) return fail_invalid("qou_calib_loss: NULL handle");
    if (total) *total = r->v.loss;
    if (spx) *spx = r->v.blocks.spx;
    if (vix) *vix = r->v.blocks.vix;
    if (futures) *futures = r->v.blocks.futures;
    if (ssr) *ssr = r->v.blocks.ssr;
    return QOU_OK;
}

qou_status qou_calib_stats(const qou_calib* r, int* n_evals, int* restarts_used) {
    if (!r) return fail_invalid("qou_calib_stats: NULL handle");
    if (n_evals) *n_evals = r->v.n_evals;
    if (restarts_used) *restarts_used = r->v.restarts_used;
    return QOU_OK;
}

qou_status qou_calib_to_json(const qou_calib* r, char** out_json) {
    if (!r || !out_json) return fail_invalid("qou_calib_to_json: NULL argument");
    return guarded([&] {
        *out_json = copy_string(quintic::calibration_result_to_json(r->v));
    });
}

}  // extern "C"
