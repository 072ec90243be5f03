#include "quintic/ssr.hpp"

#include <cmath>
#include <string>

#include "quintic/errors.hpp"
#include "quintic/implied_vol.hpp"
#include "quintic/vix.hpp"

namespace quintic {

SsrReport model_ssr(const ModelParams& params, const ForwardVarianceCurve& curve,
                    std::span<const double> maturities, double epsilon,
                    const McConfig& config) {
    if (maturities.empty()) throw InvalidInput("model_ssr: no maturities");
    if (!(epsilon > 0.0)) throw InvalidInput("model_ssr: epsilon must be positive");
    if (params.alpha[0] == 0.0)
        throw InvalidInput(
            "model_ssr: alpha[0] = 0 makes the t = 0 spot vol vanish; the bump map "
            "epsilon * rho / sigma_0 is undefined");

    const double sigma0 =
        std::sqrt(g0_squared(params, curve, 0.0)) * polynomial_value(params.alpha, 0.0);
    // A spot shock of relative size eps maps to this shift of both factors.
    const double shift_full = epsilon * params.rho / sigma0;
    const double shift_half = 0.5 * epsilon * params.rho / sigma0;
    const StateOffset variants[3] = {{0.0, 0.0},
                                     {shift_full, shift_full},
                                     {shift_half, shift_half}};

    const AggregateBatch batch =
        simulate_aggregates(params, curve, maturities, config, variants);

    SsrReport report;
    report.sigma0 = sigma0;
    report.config = config;
    for (std::size_t mi = 0; mi < maturities.size(); ++mi) {
        const double maturity = maturities[mi];
        const int mat = static_cast<int>(mi);

        // Base smile around the money.
        const auto atm_base = conditional_call_per_path(batch, 0, mat, 1.0, params.rho);
        const PriceStats atm_price = reduce_mc(atm_base, batch.antithetic);
        const double iv0 = implied_vol(atm_price.value, 1.0, 1.0, maturity, true);

        const double dk = 0.5 * iv0 * std::sqrt(maturity);
        const double k_up = std::exp(dk);
        const double k_dn = std::exp(-dk);
        const double iv_up = implied_vol(
            reduce_mc(conditional_call_per_path(batch, 0, mat, k_up, params.rho),
                      batch.antithetic)
                .value,
            1.0, k_up, maturity, true);
        const double iv_dn = implied_vol(
            reduce_mc(conditional_call_per_path(batch, 0, mat, k_dn, params.rho),
                      batch.antithetic)
                .value,
            1.0, k_dn, maturity, true);
        const double skew = (iv_up - iv_dn) / (2.0 * dk);
        if (std::fabs(skew) < 1e-4)
            throw NumericFailure("model_ssr: |atm skew| = " + std::to_string(skew) +
                                 " at maturity " + std::to_string(maturity) +
                                 " is too small for a stable ratio");

        // Bumped ATM vols; the price noise cancels pathwise, so the paired
        // differences carry the statistical error of the whole estimator.
        const auto atm_full = conditional_call_per_path(batch, 1, mat, 1.0, params.rho);
        const auto atm_half = conditional_call_per_path(batch, 2, mat, 1.0, params.rho);
        std::vector<double> diff_full(atm_base.size()), diff_half(atm_base.size());
        for (std::size_t p = 0; p < atm_base.size(); ++p) {
            diff_full[p] = atm_full[p] - atm_base[p];
            diff_half[p] = atm_half[p] - atm_base[p];
        }
        const PriceStats d_full = reduce_mc(diff_full, batch.antithetic);
        const PriceStats d_half = reduce_mc(diff_half, batch.antithetic);

        const double iv_full = implied_vol(atm_price.value + d_full.value, 1.0, 1.0,
                                           maturity, true);
        const double iv_half = implied_vol(atm_price.value + d_half.value, 1.0, 1.0,
                                           maturity, true);
        const double vega = bs_vega(1.0, 1.0, maturity, iv0);

        SsrPoint point;
        point.maturity = maturity;
        point.epsilon = epsilon;
        point.atm_iv = iv0;
        point.atm_iv_bumped = iv_full;
        point.atm_skew = skew;
        point.ssr = (iv_full - iv0) / (epsilon * skew);
        point.ssr_half_epsilon = (iv_half - iv0) / (0.5 * epsilon * skew);
        // Delta method through the vol inversion; skew noise is second order
        // here because the same draws price every leg.
        point.se = d_full.se / (vega * epsilon * std::fabs(skew));
        report.points.push_back(point);
    }
    return report;
}

std::vector<EmpiricalSsrPoint> empirical_ssr(std::span<const std::int64_t> dates,
                                             std::span<const double> atm_iv,
                                             std::span<const double> atm_skew,
                                             std::span<const double> log_spot, int window,
                                             double outlier_sigmas, int min_obs) {
    const std::size_t n = dates.size();
    if (atm_iv.size() != n || atm_skew.size() != n || log_spot.size() != n)
        throw InvalidInput("empirical_ssr: input series must be aligned");
    if (window < 2) throw InvalidInput("empirical_ssr: window must span at least 2 days");
    if (min_obs < 2) throw InvalidInput("empirical_ssr: min_obs must be >= 2");
    if (!(outlier_sigmas > 0.0))
        throw InvalidInput("empirical_ssr: outlier_sigmas must be positive");
    for (std::size_t i = 1; i < n; ++i)
        if (dates[i] <= dates[i - 1])
            throw InvalidInput("empirical_ssr: dates must be strictly increasing");

    std::vector<EmpiricalSsrPoint> out;
    if (n == 0 || static_cast<std::size_t>(window) >= n) return out;

    // Daily observations: y_t = iv change, x_t = skew * log-return, t >= 1.
    std::vector<double> xs(n, 0.0), ys(n, 0.0);
    for (std::size_t t = 1; t < n; ++t) {
        ys[t] = atm_iv[t] - atm_iv[t - 1];
        xs[t] = atm_skew[t - 1] * (log_spot[t] - log_spot[t - 1]);
    }

    for (std::size_t end = static_cast<std::size_t>(window); end < n; ++end) {
        const std::size_t lo = end - static_cast<std::size_t>(window) + 1;
        double mx = 0.0, my = 0.0;
        const double count = static_cast<double>(window);
        for (std::size_t t = lo; t <= end; ++t) {
            mx += xs[t];
            my += ys[t];
        }
        mx /= count;
        my /= count;
        double vx = 0.0, vy = 0.0;
        for (std::size_t t = lo; t <= end; ++t) {
            vx += (xs[t] - mx) * (xs[t] - mx);
            vy += (ys[t] - my) * (ys[t] - my);
        }
        const double sx = std::sqrt(vx / count);
        const double sy = std::sqrt(vy / count);

        double sxy = 0.0, sxx = 0.0;
        int used = 0;
        for (std::size_t t = lo; t <= end; ++t) {
            if (std::fabs(xs[t] - mx) > outlier_sigmas * sx) continue;
            if (std::fabs(ys[t] - my) > outlier_sigmas * sy) continue;
            sxy += xs[t] * ys[t];
            sxx += xs[t] * xs[t];
            ++used;
        }

        EmpiricalSsrPoint point;
        point.date = dates[end];
        point.n_used = used;
        if (used >= min_obs && sxx > 0.0) {
            point.value = sxy / sxx;
            point.ok = true;
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace quintic
