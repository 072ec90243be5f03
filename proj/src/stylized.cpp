#include "quintic/stylized.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quintic/errors.hpp"
#include "quintic/mc.hpp"
#include "quintic/rng.hpp"
#include "quintic/threading.hpp"
#include "quintic/vix.hpp"

namespace quintic {

namespace {

double mean_of(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc / static_cast<double>(x.size());
}

void check_dates(const DatedSeries& s, const char* who) {
    if (s.dates.size() != s.values.size())
        throw InvalidInput(std::string(who) + ": dates/values size mismatch");
    for (std::size_t i = 1; i < s.dates.size(); ++i)
        if (s.dates[i] <= s.dates[i - 1])
            throw InvalidInput(std::string(who) + ": dates must be strictly increasing");
}

// Inner join on dates; leading/trailing entries outside the overlap drop out,
// which is what makes the estimators gap- and shift-invariant.
void align(const DatedSeries& a, const DatedSeries& b, std::vector<double>& va,
           std::vector<double>& vb, const char* who) {
    check_dates(a, who);
    check_dates(b, who);
    va.clear();
    vb.clear();
    std::size_t i = 0, j = 0;
    while (i < a.dates.size() && j < b.dates.size()) {
        if (a.dates[i] < b.dates[j]) {
            ++i;
        } else if (b.dates[j] < a.dates[i]) {
            ++j;
        } else {
            va.push_back(a.values[i++]);
            vb.push_back(b.values[j++]);
        }
    }
    if (va.empty()) throw InvalidInput(std::string(who) + ": series share no dates");
}

}  // namespace

DatedSeries realized_vol(const IntradayReturns& intraday, double periods_per_year) {
    if (intraday.periods_per_day < 1)
        throw InvalidInput("realized_vol: periods_per_day must be >= 1");
    if (!(periods_per_year > 0.0))
        throw InvalidInput("realized_vol: periods_per_year must be positive");
    const std::size_t ppd = static_cast<std::size_t>(intraday.periods_per_day);
    if (intraday.r.size() != intraday.dates.size() * ppd)
        throw InvalidInput("realized_vol: intraday block is ragged (days * periods != size)");

    const double scale = periods_per_year / static_cast<double>(intraday.periods_per_day);
    DatedSeries out;
    out.dates = intraday.dates;
    out.values.resize(intraday.dates.size());
    for (std::size_t d = 0; d < intraday.dates.size(); ++d) {
        double ss = 0.0;
        for (std::size_t k = 0; k < ppd; ++k) {
            const double r = intraday.r[d * ppd + k];
            ss += r * r;
        }
        out.values[d] = std::sqrt(scale * ss);
    }
    return out;
}

std::vector<double> acf(std::span<const double> series, int max_lag) {
    if (max_lag < 0) throw InvalidInput("acf: max_lag must be nonnegative");
    if (static_cast<int>(series.size()) <= max_lag + 30)
        throw InvalidInput("acf: series too short for requested lags");

    const double mu = mean_of(series);
    double denom = 0.0;
    for (double v : series) denom += (v - mu) * (v - mu);
    if (denom <= 0.0) throw InvalidInput("acf: constant series has no autocorrelation");

    std::vector<double> out(static_cast<std::size_t>(max_lag) + 1);
    for (int lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (std::size_t t = static_cast<std::size_t>(lag); t < series.size(); ++t)
            acc += (series[t] - mu) * (series[t - static_cast<std::size_t>(lag)] - mu);
        out[static_cast<std::size_t>(lag)] = acc / denom;
    }
    return out;
}

MomentTermStructure moment_term_structure(std::span<const double> returns,
                                          std::span<const int> horizons) {
    MomentTermStructure out;
    for (int h : horizons) {
        if (h < 1) throw InvalidInput("moment_term_structure: horizons must be >= 1");
        const int n_obs = static_cast<int>(returns.size()) / h;
        if (n_obs < 30) {
            out.omitted.push_back(h);
            continue;
        }
        std::vector<double> agg(static_cast<std::size_t>(n_obs));
        for (int i = 0; i < n_obs; ++i) {
            double acc = 0.0;
            for (int k = 0; k < h; ++k)
                acc += returns[static_cast<std::size_t>(i * h + k)];
            agg[static_cast<std::size_t>(i)] = acc;
        }
        const double mu = mean_of(agg);
        double m2 = 0.0, m3 = 0.0, m4 = 0.0;
        for (double v : agg) {
            const double d = v - mu;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n_obs;
        m3 /= n_obs;
        m4 /= n_obs;
        if (m2 <= 0.0)
            throw InvalidInput("moment_term_structure: degenerate returns at horizon " +
                               std::to_string(h));
        MomentRow row;
        row.horizon = h;
        row.n_obs = n_obs;
        row.skewness = m3 / std::pow(m2, 1.5);
        row.excess_kurtosis = m4 / (m2 * m2) - 3.0;
        out.rows.push_back(row);
    }
    return out;
}

std::vector<double> leverage(const DatedSeries& returns, const DatedSeries& variance,
                             int max_lag) {
    if (max_lag < 1) throw InvalidInput("leverage: max_lag must be >= 1");
    std::vector<double> r, w;
    align(returns, variance, r, w, "leverage");
    const int n = static_cast<int>(r.size());
    if (n <= 2 * max_lag + 10) throw InvalidInput("leverage: overlap too short");

    double r2_mean = 0.0, w_mean = 0.0;
    for (int t = 0; t < n; ++t) {
        r2_mean += r[static_cast<std::size_t>(t)] * r[static_cast<std::size_t>(t)];
        w_mean += w[static_cast<std::size_t>(t)];
    }
    r2_mean /= n;
    w_mean /= n;
    if (!(r2_mean > 0.0) || !(w_mean > 0.0))
        throw InvalidInput("leverage: degenerate inputs");
    const double norm = r2_mean * std::sqrt(w_mean);

    std::vector<double> out(static_cast<std::size_t>(2 * max_lag) + 1);
    for (int tau = -max_lag; tau <= max_lag; ++tau) {
        double acc = 0.0;
        int cnt = 0;
        for (int t = std::max(0, -tau); t < n - std::max(0, tau); ++t) {
            acc += r[static_cast<std::size_t>(t)] *
                   (w[static_cast<std::size_t>(t + tau)] - w_mean);
            ++cnt;
        }
        out[static_cast<std::size_t>(tau + max_lag)] = acc / (cnt * norm);
    }
    return out;
}

ZumbachReport zumbach(const DatedSeries& vols, const DatedSeries& returns, int max_lag) {
    if (max_lag < 1) throw InvalidInput("zumbach: max_lag must be >= 1");
    std::vector<double> sig, r;
    align(vols, returns, sig, r, "zumbach");
    const int n = static_cast<int>(r.size());
    if (n < 10 * max_lag) throw InvalidInput("zumbach: need length >= 10 * max_lag");

    std::vector<double> s2(static_cast<std::size_t>(n)), r2(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        s2[static_cast<std::size_t>(t)] =
            sig[static_cast<std::size_t>(t)] * sig[static_cast<std::size_t>(t)];
        r2[static_cast<std::size_t>(t)] =
            r[static_cast<std::size_t>(t)] * r[static_cast<std::size_t>(t)];
    }

    // rho at signed lag: correlation of s2_t with r2_{t-tau}, all moments on
    // the overlapping window.
    auto rho_at = [&](int tau) {
        const int lo = std::max(0, tau);        // range of t
        const int hi = n + std::min(0, tau);    // exclusive
        const int cnt = hi - lo;
        if (cnt < 3) throw InvalidInput("zumbach: overlap too short");
        double ms = 0.0, mr = 0.0;
        for (int t = lo; t < hi; ++t) {
            ms += s2[static_cast<std::size_t>(t)];
            mr += r2[static_cast<std::size_t>(t - tau)];
        }
        ms /= cnt;
        mr /= cnt;
        double cov = 0.0, norm2 = 0.0;
        for (int t = lo; t < hi; ++t) {
            const double ds = s2[static_cast<std::size_t>(t)] - ms;
            const double dr = r2[static_cast<std::size_t>(t - tau)] - mr;
            cov += ds * dr;
            norm2 += ds * ds * dr * dr;
        }
        if (!(norm2 > 0.0)) throw InvalidInput("zumbach: degenerate inputs");
        return std::pair<double, double>{cov / cnt, (cov / cnt) / std::sqrt(norm2 / cnt)};
    };

    ZumbachReport rep;
    rep.rho_zero = rho_at(0).second;
    double running = 0.0;
    for (int tau = 1; tau <= max_lag; ++tau) {
        const auto fwd = rho_at(tau);
        const auto bwd = rho_at(-tau);
        rep.c_fwd.push_back(fwd.first);
        rep.rho_fwd.push_back(fwd.second);
        rep.rho_bwd.push_back(bwd.second);
        running += fwd.second - bwd.second;
        rep.z.push_back(running);
    }
    return rep;
}

BootstrapBands block_bootstrap_ci(
    int n_days, int n_resamples, int block, std::uint64_t seed,
    const std::function<std::vector<double>(std::span<const std::int64_t>)>& statistic) {
    if (n_days < 2) throw InvalidInput("block_bootstrap_ci: need at least 2 days");
    if (n_resamples < 10) throw InvalidInput("block_bootstrap_ci: need at least 10 resamples");
    if (block < 1 || block > n_days)
        throw InvalidInput("block_bootstrap_ci: block must lie in [1, n_days]");

    // Probe the statistic's output length on the identity resample.
    std::vector<std::int64_t> identity(static_cast<std::size_t>(n_days));
    for (int i = 0; i < n_days; ++i) identity[static_cast<std::size_t>(i)] = i;
    const std::size_t dim = statistic(identity).size();

    std::vector<double> samples(static_cast<std::size_t>(n_resamples) * dim);
    parallel_for(0, n_resamples, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(n_days));
        for (std::int64_t b = lo; b < hi; ++b) {
            // Circular blocks with per-resample deterministic starts.
            std::size_t pos = 0;
            std::uint64_t draw = 0;
            while (pos < idx.size()) {
                const double u =
                    uniform_draw(seed, static_cast<std::uint64_t>(b), draw++, 0);
                const int start = static_cast<int>(u * n_days);
                for (int k = 0; k < block && pos < idx.size(); ++k)
                    idx[pos++] = (start + k) % n_days;
            }
            const std::vector<double> stat = statistic(idx);
            if (stat.size() != dim)
                throw NumericFailure("block_bootstrap_ci: statistic changed dimension");
            std::copy(stat.begin(), stat.end(),
                      samples.begin() + static_cast<std::ptrdiff_t>(
                                            static_cast<std::size_t>(b) * dim));
        }
    });

    BootstrapBands bands;
    bands.lo.resize(dim);
    bands.hi.resize(dim);
    std::vector<double> column(static_cast<std::size_t>(n_resamples));
    for (std::size_t c = 0; c < dim; ++c) {
        for (int b = 0; b < n_resamples; ++b)
            column[static_cast<std::size_t>(b)] =
                samples[static_cast<std::size_t>(b) * dim + c];
        std::sort(column.begin(), column.end());
        auto quantile = [&](double p) {
            const double pos = p * static_cast<double>(n_resamples - 1);
            const std::size_t i = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(i);
            if (i + 1 >= column.size()) return column.back();
            return (1.0 - frac) * column[i] + frac * column[i + 1];
        };
        bands.lo[c] = quantile(0.025);
        bands.hi[c] = quantile(0.975);
    }
    return bands;
}

MarketSeries simulate_market_series(const ModelParams& params,
                                    const ForwardVarianceCurve& curve, int n_days,
                                    int periods_per_day, std::uint64_t seed,
                                    int trading_days_per_year) {
    if (n_days < 1) throw InvalidInput("simulate_market_series: n_days must be >= 1");
    if (periods_per_day < 1)
        throw InvalidInput("simulate_market_series: periods_per_day must be >= 1");
    if (trading_days_per_year < 1)
        throw InvalidInput("simulate_market_series: trading_days_per_year must be >= 1");

    const double h = 1.0 / (static_cast<double>(trading_days_per_year) * periods_per_day);
    const IncrementLaw law = increment_law(params, h);
    const std::int64_t total =
        static_cast<std::int64_t>(n_days) * periods_per_day;

    MarketSeries out;
    out.intraday.periods_per_day = periods_per_day;
    out.intraday.dates.resize(static_cast<std::size_t>(n_days));
    for (int d = 0; d < n_days; ++d) out.intraday.dates[static_cast<std::size_t>(d)] = d;
    out.intraday.r.resize(static_cast<std::size_t>(total));
    out.daily_returns.dates = out.intraday.dates;
    out.daily_returns.values.assign(static_cast<std::size_t>(n_days), 0.0);
    out.spot_vol.dates = out.intraday.dates;
    out.spot_vol.values.assign(static_cast<std::size_t>(n_days), 0.0);

    const double rho = params.rho;
    const double rho_bar = std::sqrt(1.0 - rho * rho);
    const double sqrt_h = std::sqrt(h);
    double x = 0.0, y = 0.0;
    for (std::int64_t j = 0; j < total; ++j) {
        const double t = static_cast<double>(j) * h;
        const double g0 = std::sqrt(g0_squared(params, curve, t));
        const double z = params.theta * x + (1.0 - params.theta) * y;
        const double sigma = g0 * polynomial_value(params.alpha, z);
        if (j % periods_per_day == 0)
            out.spot_vol.values[static_cast<std::size_t>(j / periods_per_day)] = sigma;

        const std::uint64_t step = static_cast<std::uint64_t>(j);
        const double z0 = normal_draw(seed, 0, step, 0);
        const double z1 = normal_draw(seed, 0, step, 1);
        const double z2 = normal_draw(seed, 0, step, 2);
        const double z3 = normal_draw(seed, 0, step, 3);
        const double dw = law.map[0] * z0 + law.map[1] * z1 + law.map[2] * z2;
        const double ix = law.map[3] * z0 + law.map[4] * z1 + law.map[5] * z2;
        const double iy = law.map[6] * z0 + law.map[7] * z1 + law.map[8] * z2;

        const double ret =
            -0.5 * sigma * sigma * h + sigma * (rho * dw + rho_bar * sqrt_h * z3);
        out.intraday.r[static_cast<std::size_t>(j)] = ret;
        out.daily_returns.values[static_cast<std::size_t>(j / periods_per_day)] += ret;

        x = law.decay_x * x + ix;
        y = law.decay_y * y + iy;
    }
    return out;
}

}  // namespace quintic
