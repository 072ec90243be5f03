#include "quintic/mc.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "quintic/errors.hpp"
#include "quintic/implied_vol.hpp"
#include "quintic/rng.hpp"
#include "quintic/threading.hpp"
#include "quintic/vix.hpp"

namespace quintic {

namespace {

// (1 - exp(-a t)) / a in extended precision; a = 0 limit is t.
long double omeo(long double a, long double t) {
    if (a == 0.0L) return t;
    return -std::expm1l(-a * t) / a;
}

}  // namespace

SimGrid make_grid(double horizon, int steps_per_year) {
    if (!(horizon > 0.0)) throw InvalidInput("make_grid: horizon must be positive");
    if (steps_per_year < 1) throw InvalidInput("make_grid: steps_per_year must be >= 1");
    SimGrid grid;
    grid.horizon = horizon;
    grid.steps_per_year = steps_per_year;
    grid.n_steps = std::max(
        1, static_cast<int>(std::ceil(horizon * steps_per_year - 1e-9)));
    grid.h = horizon / grid.n_steps;
    return grid;
}

IncrementLaw increment_law(const ModelParams& params, double h) {
    if (!(h > 0.0)) throw InvalidInput("increment_law: h must be positive");
    const long double lx = params.lambda_x;
    const long double ly = params.lambda_y;
    const long double hl = h;

    // Covariance of (dW, I_x, I_y); extended precision because the Schur
    // complements cancel to O((lambda h)^2) of the diagonal scale.
    const long double c11 = hl;
    const long double c21 = omeo(lx, hl);
    const long double c22 = omeo(2.0L * lx, hl);
    const long double c31 = omeo(ly, hl);
    const long double c32 = omeo(lx + ly, hl);
    const long double c33 = omeo(2.0L * ly, hl);

    IncrementLaw law;
    law.h = h;
    law.decay_x = std::exp(-params.lambda_x * h);
    law.decay_y = std::exp(-params.lambda_y * h);

    const long double l11 = std::sqrt(c11);
    const long double l21 = c21 / l11;
    long double d2 = c22 - l21 * l21;
    if (d2 < 0.0L && d2 > -1e-10L * c22) d2 = 0.0L;
    const long double l31 = c31 / l11;
    long double l22 = 0.0L, l32 = 0.0L, d3 = 0.0L;
    bool ok = d2 >= 0.0L;
    if (ok) {
        l22 = std::sqrt(d2);
        l32 = (l22 > 0.0L) ? (c32 - l31 * l21) / l22 : 0.0L;
        d3 = c33 - l31 * l31 - l32 * l32;
        // lambda_x = lambda_y collapses I_y onto I_x; the residual is zero in
        // exact arithmetic.
        if (d3 < 0.0L && d3 > -1e-10L * c33) d3 = 0.0L;
        ok = d3 >= 0.0L;
    }
    if (ok) {
        law.map[0] = static_cast<double>(l11);
        law.map[3] = static_cast<double>(l21);
        law.map[4] = static_cast<double>(l22);
        law.map[6] = static_cast<double>(l31);
        law.map[7] = static_cast<double>(l32);
        law.map[8] = static_cast<double>(std::sqrt(d3));
        return law;
    }

    // Indefinite beyond roundoff: floor the spectrum at zero and use the
    // symmetric square root.  Callers can surface law.floored as a warning.
    law.floored = true;
    Eigen::Matrix3d cov;
    cov << static_cast<double>(c11), static_cast<double>(c21), static_cast<double>(c31),
        static_cast<double>(c21), static_cast<double>(c22), static_cast<double>(c32),
        static_cast<double>(c31), static_cast<double>(c32), static_cast<double>(c33);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    if (solver.info() != Eigen::Success)
        throw NumericFailure("increment_law: eigen decomposition failed");
    Eigen::Vector3d evals = solver.eigenvalues().cwiseMax(0.0);
    Eigen::Matrix3d root =
        solver.eigenvectors() * evals.cwiseSqrt().asDiagonal() * solver.eigenvectors().transpose();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) law.map[3 * r + c] = root(r, c);
    return law;
}

namespace {

struct StepPlan {
    // Flattened piecewise-uniform schedule.
    std::vector<IncrementLaw> laws;
    std::vector<int> law_of;       // per step
    std::vector<double> h_of;      // per step
    std::vector<double> sqrt_h;    // per step, for the orthogonal increment
    std::vector<double> g0_of;     // sqrt(g0^2) at the step's left endpoint
    std::vector<double> t_left;    // relative left time of the step
    std::vector<int> record_of;    // maturity index completed at step end, else -1
    int total_steps = 0;
};

StepPlan build_plan(const ModelParams& params, const ForwardVarianceCurve& curve,
                    std::span<const double> maturities, int steps_per_year, double t0) {
    StepPlan plan;
    double prev = 0.0;
    for (std::size_t mi = 0; mi < maturities.size(); ++mi) {
        const double seg = maturities[mi] - prev;
        const int n = std::max(1, static_cast<int>(std::lround(seg * steps_per_year)));
        const double h = seg / n;
        plan.laws.push_back(increment_law(params, h));
        const int law_idx = static_cast<int>(plan.laws.size()) - 1;
        for (int j = 0; j < n; ++j) {
            plan.law_of.push_back(law_idx);
            plan.h_of.push_back(h);
            plan.sqrt_h.push_back(std::sqrt(h));
            const double tl = prev + j * h;
            plan.t_left.push_back(tl);
            plan.g0_of.push_back(std::sqrt(g0_squared(params, curve, t0 + tl)));
            plan.record_of.push_back(j + 1 == n ? static_cast<int>(mi) : -1);
        }
        prev = maturities[mi];
    }
    plan.total_steps = static_cast<int>(plan.law_of.size());
    return plan;
}

void validate_mc(std::span<const double> maturities, const McConfig& config) {
    if (maturities.empty()) throw InvalidInput("simulate_aggregates: no maturities");
    double prev = 0.0;
    for (double m : maturities) {
        if (!(m > prev))
            throw InvalidInput("simulate_aggregates: maturities must be ascending and positive");
        prev = m;
    }
    if (config.n_paths < 2) throw InvalidInput("simulate_aggregates: need at least 2 paths");
    if (config.antithetic && config.n_paths % 2 != 0)
        throw InvalidInput("simulate_aggregates: antithetic runs need an even path count");
    if (config.steps_per_year < 1)
        throw InvalidInput("simulate_aggregates: steps_per_year must be >= 1");
}

}  // namespace

AggregateBatch simulate_aggregates(const ModelParams& params,
                                   const ForwardVarianceCurve& curve,
                                   std::span<const double> maturities,
                                   const McConfig& config,
                                   std::span<const StateOffset> variants, double t0,
                                   bool with_plain) {
    validate_mc(maturities, config);
    if (t0 < 0.0) throw InvalidInput("simulate_aggregates: t0 must be nonnegative");

    static const StateOffset kOrigin{};
    if (variants.empty()) variants = std::span<const StateOffset>(&kOrigin, 1);

    const StepPlan plan = build_plan(params, curve, maturities, config.steps_per_year, t0);

    AggregateBatch out;
    out.maturities.assign(maturities.begin(), maturities.end());
    out.n_paths = config.n_paths;
    out.n_variants = static_cast<int>(variants.size());
    out.seed = config.seed;
    out.antithetic = config.antithetic;
    out.has_plain = with_plain;
    out.t0 = t0;
    out.variants.assign(variants.begin(), variants.end());

    const std::size_t slots = static_cast<std::size_t>(out.n_variants) *
                              maturities.size() * static_cast<std::size_t>(out.n_paths);
    out.m_int.assign(slots, 0.0);
    out.v_int.assign(slots, 0.0);
    out.x_end.assign(slots, 0.0);
    out.y_end.assign(slots, 0.0);
    if (with_plain) out.log_s.assign(slots, 0.0);

    // Exact mean of the left-rule variance integral, per variant and maturity.
    out.v_mean.assign(static_cast<std::size_t>(out.n_variants) * maturities.size(), 0.0);
    for (int v = 0; v < out.n_variants; ++v) {
        double acc = 0.0;
        std::size_t mi = 0;
        for (int j = 0; j < plan.total_steps; ++j) {
            acc += forward_variance(params, curve, t0, t0 + plan.t_left[static_cast<std::size_t>(j)],
                                    variants[static_cast<std::size_t>(v)].x0,
                                    variants[static_cast<std::size_t>(v)].y0) *
                   plan.h_of[static_cast<std::size_t>(j)];
            if (plan.record_of[static_cast<std::size_t>(j)] >= 0)
                out.v_mean[static_cast<std::size_t>(v) * maturities.size() + mi++] = acc;
        }
    }

    const double theta = params.theta;
    const double rho = params.rho;
    const double rho_bar = std::sqrt(1.0 - rho * rho);
    const auto& alpha = params.alpha;
    const int n_variants = out.n_variants;

    parallel_for(0, config.n_paths, [&](std::int64_t lo, std::int64_t hi) {
        std::vector<double> sx(static_cast<std::size_t>(n_variants));
        std::vector<double> sy(static_cast<std::size_t>(n_variants));
        std::vector<double> sm(static_cast<std::size_t>(n_variants));
        std::vector<double> sv(static_cast<std::size_t>(n_variants));
        std::vector<double> sl(static_cast<std::size_t>(n_variants));
        for (std::int64_t p = lo; p < hi; ++p) {
            const std::uint64_t draw_path =
                config.antithetic ? static_cast<std::uint64_t>(p >> 1)
                                  : static_cast<std::uint64_t>(p);
            const double sign = (config.antithetic && (p & 1)) ? -1.0 : 1.0;
            for (int v = 0; v < n_variants; ++v) {
                sx[static_cast<std::size_t>(v)] = variants[static_cast<std::size_t>(v)].x0;
                sy[static_cast<std::size_t>(v)] = variants[static_cast<std::size_t>(v)].y0;
                sm[static_cast<std::size_t>(v)] = 0.0;
                sv[static_cast<std::size_t>(v)] = 0.0;
                sl[static_cast<std::size_t>(v)] = 0.0;
            }
            for (int j = 0; j < plan.total_steps; ++j) {
                const std::uint64_t step = static_cast<std::uint64_t>(j);
                const double z0 = sign * normal_draw(config.seed, draw_path, step, 0);
                const double z1 = sign * normal_draw(config.seed, draw_path, step, 1);
                const double z2 = sign * normal_draw(config.seed, draw_path, step, 2);
                const IncrementLaw& law = plan.laws[static_cast<std::size_t>(
                    plan.law_of[static_cast<std::size_t>(j)])];
                const double dw = law.map[0] * z0 + law.map[1] * z1 + law.map[2] * z2;
                const double ix = law.map[3] * z0 + law.map[4] * z1 + law.map[5] * z2;
                const double iy = law.map[6] * z0 + law.map[7] * z1 + law.map[8] * z2;
                const double h = plan.h_of[static_cast<std::size_t>(j)];
                const double g0 = plan.g0_of[static_cast<std::size_t>(j)];
                double dwp = 0.0;
                if (with_plain)
                    dwp = plan.sqrt_h[static_cast<std::size_t>(j)] * sign *
                          normal_draw(config.seed, draw_path, step, 3);
                for (int v = 0; v < n_variants; ++v) {
                    const std::size_t vi = static_cast<std::size_t>(v);
                    const double z = theta * sx[vi] + (1.0 - theta) * sy[vi];
                    const double sigma = g0 * polynomial_value(alpha, z);
                    sm[vi] += sigma * dw;
                    sv[vi] += sigma * sigma * h;
                    if (with_plain)
                        sl[vi] += -0.5 * sigma * sigma * h + sigma * (rho * dw + rho_bar * dwp);
                    sx[vi] = law.decay_x * sx[vi] + ix;
                    sy[vi] = law.decay_y * sy[vi] + iy;
                }
                const int rec = plan.record_of[static_cast<std::size_t>(j)];
                if (rec >= 0) {
                    for (int v = 0; v < n_variants; ++v) {
                        const std::size_t vi = static_cast<std::size_t>(v);
                        const std::size_t slot = out.idx(v, rec, p);
                        out.m_int[slot] = sm[vi];
                        out.v_int[slot] = sv[vi];
                        out.x_end[slot] = sx[vi];
                        out.y_end[slot] = sy[vi];
                        if (with_plain) out.log_s[slot] = sl[vi];
                    }
                }
            }
        }
    });
    return out;
}

PathBatch simulate_factors(const ModelParams& params, const SimGrid& grid,
                           std::int64_t n_paths, std::uint64_t seed, bool antithetic) {
    if (grid.n_steps < 1) throw InvalidInput("simulate_factors: empty grid");
    if (n_paths < 1) throw InvalidInput("simulate_factors: need at least one path");
    if (antithetic && n_paths % 2 != 0)
        throw InvalidInput("simulate_factors: antithetic runs need an even path count");

    PathBatch batch;
    batch.grid = grid;
    batch.n_paths = n_paths;
    batch.seed = seed;
    batch.antithetic = antithetic;
    const std::size_t cols = static_cast<std::size_t>(grid.n_steps) + 1;
    batch.x.assign(static_cast<std::size_t>(n_paths) * cols, 0.0);
    batch.y.assign(static_cast<std::size_t>(n_paths) * cols, 0.0);
    batch.dw.assign(static_cast<std::size_t>(n_paths) * static_cast<std::size_t>(grid.n_steps),
                    0.0);

    const IncrementLaw law = increment_law(params, grid.h);
    parallel_for(0, n_paths, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            const std::uint64_t draw_path =
                antithetic ? static_cast<std::uint64_t>(p >> 1) : static_cast<std::uint64_t>(p);
            const double sign = (antithetic && (p & 1)) ? -1.0 : 1.0;
            double x = 0.0, y = 0.0;
            const std::size_t row = static_cast<std::size_t>(p) * cols;
            const std::size_t wrow =
                static_cast<std::size_t>(p) * static_cast<std::size_t>(grid.n_steps);
            batch.x[row] = 0.0;
            batch.y[row] = 0.0;
            for (int j = 0; j < grid.n_steps; ++j) {
                const std::uint64_t step = static_cast<std::uint64_t>(j);
                const double z0 = sign * normal_draw(seed, draw_path, step, 0);
                const double z1 = sign * normal_draw(seed, draw_path, step, 1);
                const double z2 = sign * normal_draw(seed, draw_path, step, 2);
                const double dw = law.map[0] * z0 + law.map[1] * z1 + law.map[2] * z2;
                const double ix = law.map[3] * z0 + law.map[4] * z1 + law.map[5] * z2;
                const double iy = law.map[6] * z0 + law.map[7] * z1 + law.map[8] * z2;
                x = law.decay_x * x + ix;
                y = law.decay_y * y + iy;
                batch.dw[wrow + static_cast<std::size_t>(j)] = dw;
                batch.x[row + static_cast<std::size_t>(j) + 1] = x;
                batch.y[row + static_cast<std::size_t>(j) + 1] = y;
            }
        }
    });
    return batch;
}

void simulate_vol(const ModelParams& params, const ForwardVarianceCurve& curve,
                  PathBatch& batch) {
    if (batch.n_paths == 0) throw InvalidInput("simulate_vol: empty batch");
    const std::size_t cols = static_cast<std::size_t>(batch.grid.n_steps) + 1;
    batch.sigma.assign(batch.x.size(), 0.0);
    batch.ivar.assign(batch.x.size(), 0.0);

    std::vector<double> g0_at(cols);
    for (std::size_t i = 0; i < cols; ++i)
        g0_at[i] = std::sqrt(
            g0_squared(params, curve, static_cast<double>(i) * batch.grid.h));

    const double theta = params.theta;
    parallel_for(0, batch.n_paths, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            const std::size_t row = static_cast<std::size_t>(p) * cols;
            double acc = 0.0;
            for (std::size_t i = 0; i < cols; ++i) {
                const double z = theta * batch.x[row + i] + (1.0 - theta) * batch.y[row + i];
                const double sigma = g0_at[i] * polynomial_value(params.alpha, z);
                batch.sigma[row + i] = sigma;
                batch.ivar[row + i] = acc;
                if (i + 1 < cols) acc += sigma * sigma * batch.grid.h;
            }
        }
    });
    batch.has_vol = true;
}

namespace {

// Mean and standard error with optional antithetic pairing and a control
// variate with known mean.  The coefficient is fitted on a leading pilot
// block and then applied to every unit; refitting on the full sample would
// bias the error estimate more than the pilot does.
PriceStats reduce_units(std::span<const double> y, std::span<const double> c,
                        bool antithetic, double c_mean, bool use_cv) {
    const std::int64_t n_raw = static_cast<std::int64_t>(y.size());
    const std::int64_t n = antithetic ? n_raw / 2 : n_raw;
    if (n < 2) throw InvalidInput("reduce_units: need at least two observations");

    auto unit_y = [&](std::int64_t u) {
        return antithetic ? 0.5 * (y[static_cast<std::size_t>(2 * u)] +
                                   y[static_cast<std::size_t>(2 * u + 1)])
                          : y[static_cast<std::size_t>(u)];
    };
    auto unit_c = [&](std::int64_t u) {
        return antithetic ? 0.5 * (c[static_cast<std::size_t>(2 * u)] +
                                   c[static_cast<std::size_t>(2 * u + 1)])
                          : c[static_cast<std::size_t>(u)];
    };

    double b = 0.0;
    if (use_cv && !c.empty() && n >= 64) {
        const std::int64_t pilot = std::max<std::int64_t>(32, n / 8);
        double my = 0.0, mc = 0.0;
        for (std::int64_t u = 0; u < pilot; ++u) {
            my += unit_y(u);
            mc += unit_c(u);
        }
        my /= static_cast<double>(pilot);
        mc /= static_cast<double>(pilot);
        double cov = 0.0, var = 0.0;
        for (std::int64_t u = 0; u < pilot; ++u) {
            const double dy = unit_y(u) - my;
            const double dc = unit_c(u) - mc;
            cov += dy * dc;
            var += dc * dc;
        }
        // Degenerate integrated variance (deterministic vol) disables the CV.
        if (var > 1e-24 * static_cast<double>(pilot) * std::max(c_mean * c_mean, 1e-300))
            b = cov / var;
    }

    double mean = 0.0;
    for (std::int64_t u = 0; u < n; ++u) {
        const double z = unit_y(u) - (b != 0.0 ? b * (unit_c(u) - c_mean) : 0.0);
        mean += z;
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::int64_t u = 0; u < n; ++u) {
        const double z = unit_y(u) - (b != 0.0 ? b * (unit_c(u) - c_mean) : 0.0);
        ss += (z - mean) * (z - mean);
    }
    PriceStats stats;
    stats.value = mean;
    stats.se = std::sqrt(ss / (static_cast<double>(n - 1) * static_cast<double>(n)));
    return stats;
}

CallPriceReport price_from_mv(std::span<const double> m_int, std::span<const double> v_int,
                              std::span<const double> log_s, double v_mean,
                              std::span<const double> strikes, double rho,
                              Estimator estimator, bool antithetic, bool control_variate) {
    const std::size_t n = m_int.size();
    std::vector<double> y(n);
    CallPriceReport report;

    if (estimator == Estimator::Plain) {
        if (log_s.empty())
            throw InvalidInput("call_prices: plain estimator needs the Euler log-spot");
        std::vector<double> spot(n);
        for (std::size_t p = 0; p < n; ++p) spot[p] = std::exp(log_s[p]);
        report.forward = reduce_units(spot, {}, antithetic, 0.0, false);
        for (double strike : strikes) {
            if (!(strike > 0.0)) throw InvalidInput("call_prices: strikes must be positive");
            for (std::size_t p = 0; p < n; ++p) y[p] = std::max(spot[p] - strike, 0.0);
            report.calls.push_back(
                reduce_units(y, v_int, antithetic, v_mean, control_variate));
        }
        return report;
    }

    // Conditional (mixing) estimator: integrate the orthogonal Brownian in
    // closed form, leaving a Black price per path.
    std::vector<double> f_eff(n), tot_std(n);
    const double rho2 = rho * rho;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = std::max(v_int[p], 0.0);
        f_eff[p] = std::exp(rho * m_int[p] - 0.5 * rho2 * v);
        tot_std[p] = std::sqrt((1.0 - rho2) * v);
    }
    report.forward = reduce_units(f_eff, {}, antithetic, 0.0, false);
    for (double strike : strikes) {
        if (!(strike > 0.0)) throw InvalidInput("call_prices: strikes must be positive");
        for (std::size_t p = 0; p < n; ++p)
            y[p] = bs_price(f_eff[p], strike, 1.0, tot_std[p], /*is_call=*/true);
        report.calls.push_back(reduce_units(y, v_int, antithetic, v_mean, control_variate));
    }
    return report;
}

}  // namespace

CallPriceReport call_prices_from_aggregates(const AggregateBatch& batch, int variant,
                                            int mat_index, std::span<const double> strikes,
                                            double rho, Estimator estimator,
                                            bool control_variate) {
    if (variant < 0 || variant >= batch.n_variants)
        throw InvalidInput("call_prices_from_aggregates: variant out of range");
    if (mat_index < 0 || static_cast<std::size_t>(mat_index) >= batch.maturities.size())
        throw InvalidInput("call_prices_from_aggregates: maturity index out of range");
    if (!(rho > -1.0 && rho < 1.0))
        throw InvalidInput("call_prices_from_aggregates: rho must lie in (-1,1)");
    if (estimator == Estimator::Plain && !batch.has_plain)
        throw InvalidInput(
            "call_prices_from_aggregates: batch was simulated without the Euler log-spot");

    const std::size_t base = batch.idx(variant, mat_index, 0);
    const std::size_t n = static_cast<std::size_t>(batch.n_paths);
    const std::span<const double> m_int(batch.m_int.data() + base, n);
    const std::span<const double> v_int(batch.v_int.data() + base, n);
    const std::span<const double> log_s =
        batch.has_plain ? std::span<const double>(batch.log_s.data() + base, n)
                        : std::span<const double>();
    const double v_mean =
        batch.v_mean[static_cast<std::size_t>(variant) * batch.maturities.size() +
                     static_cast<std::size_t>(mat_index)];
    return price_from_mv(m_int, v_int, log_s, v_mean, strikes, rho, estimator,
                         batch.antithetic, control_variate);
}

std::vector<double> conditional_call_per_path(const AggregateBatch& batch, int variant,
                                              int mat_index, double strike, double rho) {
    if (variant < 0 || variant >= batch.n_variants)
        throw InvalidInput("conditional_call_per_path: variant out of range");
    if (mat_index < 0 || static_cast<std::size_t>(mat_index) >= batch.maturities.size())
        throw InvalidInput("conditional_call_per_path: maturity index out of range");
    if (!(strike > 0.0)) throw InvalidInput("conditional_call_per_path: strike must be positive");

    const std::size_t base = batch.idx(variant, mat_index, 0);
    const std::size_t n = static_cast<std::size_t>(batch.n_paths);
    const double rho2 = rho * rho;
    std::vector<double> out(n);
    for (std::size_t p = 0; p < n; ++p) {
        const double v = std::max(batch.v_int[base + p], 0.0);
        const double f = std::exp(rho * batch.m_int[base + p] - 0.5 * rho2 * v);
        out[p] = bs_price(f, strike, 1.0, std::sqrt((1.0 - rho2) * v), /*is_call=*/true);
    }
    return out;
}

PriceStats reduce_mc(std::span<const double> per_path, bool antithetic) {
    return reduce_units(per_path, {}, antithetic, 0.0, false);
}

std::vector<PriceStats> spx_call_prices(const ModelParams& params,
                                        const ForwardVarianceCurve& curve,
                                        const PathBatch& batch,
                                        std::span<const double> strikes,
                                        Estimator estimator, bool control_variate) {
    if (!batch.has_vol) throw InvalidInput("spx_call_prices: run simulate_vol first");
    const std::size_t n = static_cast<std::size_t>(batch.n_paths);
    const std::size_t cols = static_cast<std::size_t>(batch.grid.n_steps) + 1;

    std::vector<double> m_int(n), v_int(n), log_s;
    const bool need_plain = estimator == Estimator::Plain;
    if (need_plain) log_s.assign(n, 0.0);
    const double rho = params.rho;
    const double rho_bar = std::sqrt(1.0 - rho * rho);

    parallel_for(0, batch.n_paths, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t p = lo; p < hi; ++p) {
            const std::size_t row = static_cast<std::size_t>(p) * cols;
            const std::size_t wrow =
                static_cast<std::size_t>(p) * static_cast<std::size_t>(batch.grid.n_steps);
            const std::uint64_t draw_path =
                batch.antithetic ? static_cast<std::uint64_t>(p >> 1)
                                 : static_cast<std::uint64_t>(p);
            const double sign = (batch.antithetic && (p & 1)) ? -1.0 : 1.0;
            double m = 0.0, ls = 0.0;
            for (int j = 0; j < batch.grid.n_steps; ++j) {
                const double sigma = batch.sigma[row + static_cast<std::size_t>(j)];
                const double dw = batch.dw[wrow + static_cast<std::size_t>(j)];
                m += sigma * dw;
                if (need_plain) {
                    const double dwp =
                        std::sqrt(batch.grid.h) * sign *
                        normal_draw(batch.seed, draw_path, static_cast<std::uint64_t>(j), 3);
                    ls += -0.5 * sigma * sigma * batch.grid.h +
                          sigma * (rho * dw + rho_bar * dwp);
                }
            }
            m_int[static_cast<std::size_t>(p)] = m;
            v_int[static_cast<std::size_t>(p)] = batch.ivar[row + cols - 1];
            if (need_plain) log_s[static_cast<std::size_t>(p)] = ls;
        }
    });

    // Exact discrete mean of the variance integral for the control variate.
    double v_mean = 0.0;
    for (int j = 0; j < batch.grid.n_steps; ++j)
        v_mean += forward_variance(params, curve, 0.0, j * batch.grid.h, 0.0, 0.0) *
                  batch.grid.h;

    return price_from_mv(m_int, v_int,
                         need_plain ? std::span<const double>(log_s)
                                    : std::span<const double>(),
                         v_mean, strikes, rho, estimator, batch.antithetic, control_variate)
        .calls;
}

SmileReport spx_smile(const ModelParams& params, const ForwardVarianceCurve& curve,
                      const std::vector<double>& maturities,
                      const std::vector<std::vector<double>>& strikes,
                      const McConfig& config) {
    if (maturities.size() != strikes.size())
        throw InvalidInput("spx_smile: one strike list per maturity required");

    const bool with_plain = config.estimator == Estimator::Plain;
    const AggregateBatch batch = simulate_aggregates(params, curve, maturities, config, {},
                                                     0.0, with_plain);

    SmileReport report;
    report.config = config;
    for (std::size_t mi = 0; mi < maturities.size(); ++mi) {
        const CallPriceReport prices = call_prices_from_aggregates(
            batch, 0, static_cast<int>(mi), strikes[mi], params.rho, config.estimator, true);
        report.forwards.push_back(prices.forward);
        for (std::size_t ki = 0; ki < strikes[mi].size(); ++ki) {
            SmilePoint point;
            point.maturity = maturities[mi];
            point.strike = strikes[mi][ki];
            point.price = prices.calls[ki].value;
            point.price_se = prices.calls[ki].se;
            try {
                point.iv = implied_vol(point.price, 1.0, point.strike, point.maturity,
                                       /*is_call=*/true);
                const double vega = bs_vega(1.0, point.strike, point.maturity, point.iv);
                point.iv_se = vega > 1e-12 ? point.price_se / vega
                                           : std::numeric_limits<double>::infinity();
                point.ok = true;
            } catch (const Error&) {
                point.iv = std::numeric_limits<double>::quiet_NaN();
                point.iv_se = std::numeric_limits<double>::quiet_NaN();
                point.ok = false;
            }
            report.points.push_back(point);
        }
    }
    return report;
}

}  // namespace quintic
