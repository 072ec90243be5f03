#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "quintic/errors.hpp"
#include "quintic/mc.hpp"
#include "quintic/model.hpp"
#include "quintic/rng.hpp"
#include "quintic/vix.hpp"

using namespace quintic;

namespace {

ModelParams demo_params() {
    return make_params(31.8, 0.659, 0.964, -0.765,
                       std::array<double, 5>{0.0004, 0.0046, 0.0, 0.0096, 0.0});
}

double omeo(double a, double t) { return a == 0.0 ? t : -std::expm1(-a * t) / a; }

}  // namespace

TEST_CASE("one-step law reproduces the joint increment covariance") {
    for (double h : {1.0 / 252, 1.0 / 5040}) {
        for (auto [lx, ly] : std::vector<std::pair<double, double>>{
                 {31.8, 0.659}, {5.0, 5.0}, {0.01, 120.0}}) {
            const ModelParams p =
                make_params(lx, ly, 0.5, -0.5, std::array<double, 5>{0.01, 0.1, 0, 0.2, 0});
            const IncrementLaw law = increment_law(p, h);
            // C = M M^T entry by entry against the closed forms.
            auto cij = [&](int r, int c) {
                double acc = 0.0;
                for (int k = 0; k < 3; ++k) acc += law.map[3 * r + k] * law.map[3 * c + k];
                return acc;
            };
            CHECK(cij(0, 0) == doctest::Approx(h).epsilon(1e-14));
            CHECK(cij(1, 0) == doctest::Approx(omeo(lx, h)).epsilon(1e-13));
            CHECK(cij(2, 0) == doctest::Approx(omeo(ly, h)).epsilon(1e-13));
            CHECK(cij(1, 1) == doctest::Approx(omeo(2 * lx, h)).epsilon(1e-13));
            CHECK(cij(2, 2) == doctest::Approx(omeo(2 * ly, h)).epsilon(1e-13));
            CHECK(cij(2, 1) == doctest::Approx(omeo(lx + ly, h)).epsilon(1e-13));
            CHECK(law.decay_x == doctest::Approx(std::exp(-lx * h)).epsilon(1e-15));
            CHECK(law.decay_y == doctest::Approx(std::exp(-ly * h)).epsilon(1e-15));
        }
    }
    CHECK_THROWS_AS((void)increment_law(demo_params(), 0.0), InvalidInput);
}

TEST_CASE("factor paths follow the documented draw addressing") {
    const ModelParams p = demo_params();
    const SimGrid grid = make_grid(0.1, 252);
    const std::uint64_t seed = 77;
    const PathBatch batch = simulate_factors(p, grid, 6, seed, /*antithetic=*/true);
    const IncrementLaw law = increment_law(p, grid.h);

    for (std::int64_t path : {0, 1, 4, 5}) {
        const std::uint64_t draw_path = static_cast<std::uint64_t>(path) >> 1;
        const double sign = (path & 1) ? -1.0 : 1.0;
        double xx = 0.0, yy = 0.0;
        for (int i = 0; i < grid.n_steps; ++i) {
            const double z0 = sign * normal_draw(seed, draw_path, static_cast<std::uint64_t>(i), 0);
            const double z1 = sign * normal_draw(seed, draw_path, static_cast<std::uint64_t>(i), 1);
            const double z2 = sign * normal_draw(seed, draw_path, static_cast<std::uint64_t>(i), 2);
            const double dw = law.map[0] * z0;
            xx = law.decay_x * xx + law.map[3] * z0 + law.map[4] * z1;
            yy = law.decay_y * yy + law.map[6] * z0 + law.map[7] * z1 + law.map[8] * z2;
            const std::size_t cols = static_cast<std::size_t>(grid.n_steps);
            CHECK(batch.dw[static_cast<std::size_t>(path) * cols + static_cast<std::size_t>(i)] ==
                  doctest::Approx(dw).epsilon(1e-15));
            const std::size_t scols = cols + 1;
            CHECK(batch.x[static_cast<std::size_t>(path) * scols + static_cast<std::size_t>(i) + 1] ==
                  doctest::Approx(xx).epsilon(1e-15));
            CHECK(batch.y[static_cast<std::size_t>(path) * scols + static_cast<std::size_t>(i) + 1] ==
                  doctest::Approx(yy).epsilon(1e-15));
        }
    }

    CHECK_THROWS_AS((void)simulate_factors(p, grid, 5, seed, true), InvalidInput);
}

TEST_CASE("vol path is the scaled polynomial of the mixed state") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve({0.0, 0.05}, {0.02, 0.04});
    const SimGrid grid = make_grid(0.1, 252);
    PathBatch batch = simulate_factors(p, grid, 4, 9, false);
    simulate_vol(p, curve, batch);
    REQUIRE(batch.has_vol);
    const std::size_t scols = static_cast<std::size_t>(grid.n_steps) + 1;
    for (std::size_t path = 0; path < 4; ++path) {
        CHECK(batch.ivar[path * scols] == 0.0);
        for (int i = 0; i <= grid.n_steps; ++i) {
            const double t = i * grid.h;
            const double z = p.theta * batch.x[path * scols + static_cast<std::size_t>(i)] +
                             (1 - p.theta) * batch.y[path * scols + static_cast<std::size_t>(i)];
            const double want =
                std::sqrt(g0_squared(p, curve, t)) * polynomial_value(p.alpha, z);
            CHECK(batch.sigma[path * scols + static_cast<std::size_t>(i)] ==
                  doctest::Approx(want).epsilon(1e-13));
            if (i > 0)
                CHECK(batch.ivar[path * scols + static_cast<std::size_t>(i)] >=
                      batch.ivar[path * scols + static_cast<std::size_t>(i) - 1]);
        }
    }
}

TEST_CASE("aggregate engine and full-path engine price identically") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    McConfig config;
    config.n_paths = 512;
    config.steps_per_year = 252;
    config.seed = 5;
    config.antithetic = true;
    const double maturity = 0.5;
    const std::vector<double> mats = {maturity};
    const std::vector<double> strikes = {0.9, 1.0, 1.1};

    const AggregateBatch agg =
        simulate_aggregates(p, curve, mats, config, {}, 0.0, /*with_plain=*/true);
    const CallPriceReport stream = call_prices_from_aggregates(
        agg, 0, 0, strikes, p.rho, Estimator::Conditional, true);

    PathBatch batch = simulate_factors(p, make_grid(maturity, config.steps_per_year),
                                       config.n_paths, config.seed, config.antithetic);
    simulate_vol(p, curve, batch);
    const std::vector<PriceStats> full =
        spx_call_prices(p, curve, batch, strikes, Estimator::Conditional, true);

    REQUIRE(full.size() == strikes.size());
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        CHECK(full[i].value == doctest::Approx(stream.calls[i].value).epsilon(1e-13));
        CHECK(full[i].se == doctest::Approx(stream.calls[i].se).epsilon(1e-13));
    }
}

TEST_CASE("control mean of the variance integral is the curve's left sum") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    McConfig config;
    config.n_paths = 2048;
    config.steps_per_year = 504;
    config.seed = 3;
    const std::vector<double> mats = {0.25, 1.0};
    const AggregateBatch agg = simulate_aggregates(p, curve, mats, config);
    // From the origin the expected instantaneous variance is the input curve
    // itself, so the left-rule mean collapses to xi0 * t for a flat curve.
    CHECK(agg.v_mean[0] == doctest::Approx(0.03 * 0.25).epsilon(1e-12));
    CHECK(agg.v_mean[1] == doctest::Approx(0.03 * 1.0).epsilon(1e-12));

    // And the simulated integrals agree with that mean statistically.
    for (std::size_t mi = 0; mi < mats.size(); ++mi) {
        std::vector<double> v(static_cast<std::size_t>(config.n_paths));
        for (std::int64_t path = 0; path < config.n_paths; ++path)
            v[static_cast<std::size_t>(path)] = agg.v_int[agg.idx(0, static_cast<int>(mi), path)];
        const PriceStats stats = reduce_mc(v, config.antithetic);
        CHECK(std::fabs(stats.value - agg.v_mean[mi]) < 4.0 * stats.se);
    }
}

TEST_CASE("common draws across variants shift smoothly") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    McConfig config;
    config.n_paths = 256;
    config.steps_per_year = 252;
    config.seed = 21;
    const std::vector<double> mats = {0.25};
    const std::vector<StateOffset> variants = {{0.0, 0.0}, {1e-4, 0.0}};
    const AggregateBatch two = simulate_aggregates(p, curve, mats, config, variants);
    const AggregateBatch one = simulate_aggregates(p, curve, mats, config);

    double max_base_diff = 0.0, max_bump = 0.0;
    for (std::int64_t path = 0; path < config.n_paths; ++path) {
        max_base_diff = std::max(
            max_base_diff, std::fabs(two.m_int[two.idx(0, 0, path)] - one.m_int[one.idx(0, 0, path)]));
        max_bump = std::max(
            max_bump, std::fabs(two.m_int[two.idx(1, 0, path)] - two.m_int[two.idx(0, 0, path)]));
    }
    // Variant 0 is the unbumped run on the same draws...
    CHECK(max_base_diff == 0.0);
    // ...and a 1e-4 state bump moves path integrals by O(bump), far below
    // the path scale, which is only possible on common random numbers.
    CHECK(max_bump > 0.0);
    CHECK(max_bump < 5e-3);
}

TEST_CASE("antithetic reduction treats a pair as one observation") {
    const std::vector<double> vals = {1.0, 3.0, 7.0, 5.0};
    // Pair means are 2 and 6: mean 4, sample variance 8, se = 2.
    const PriceStats anti = reduce_mc(vals, true);
    CHECK(anti.value == doctest::Approx(4.0));
    CHECK(anti.se == doctest::Approx(2.0));
    // Plain: mean 4, sample variance 20/3, se = sqrt(20/12).
    const PriceStats plain = reduce_mc(vals, false);
    CHECK(plain.value == doctest::Approx(4.0));
    CHECK(plain.se == doctest::Approx(std::sqrt(20.0 / 3 / 4)));
}

TEST_CASE("estimators agree and the forward is a martingale") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    McConfig config;
    config.n_paths = 1 << 14;
    config.steps_per_year = 252;
    config.seed = 2;
    config.antithetic = true;
    const std::vector<double> mats = {0.5};
    const std::vector<double> strikes = {0.9, 1.0, 1.1};
    const AggregateBatch agg =
        simulate_aggregates(p, curve, mats, config, {}, 0.0, /*with_plain=*/true);

    const CallPriceReport cond =
        call_prices_from_aggregates(agg, 0, 0, strikes, p.rho, Estimator::Conditional, true);
    const CallPriceReport plain =
        call_prices_from_aggregates(agg, 0, 0, strikes, p.rho, Estimator::Plain, false);

    CHECK(std::fabs(cond.forward.value - 1.0) < 4.0 * cond.forward.se);
    CHECK(std::fabs(plain.forward.value - 1.0) < 4.0 * plain.forward.se);
    for (std::size_t i = 0; i < strikes.size(); ++i) {
        const double gap = std::fabs(cond.calls[i].value - plain.calls[i].value);
        const double se = std::hypot(cond.calls[i].se, plain.calls[i].se);
        CHECK(gap < 4.0 * se);
        // Conditioning integrates out the orthogonal Brownian, so it can
        // only shrink the sampling noise.
        CHECK(cond.calls[i].se < plain.calls[i].se);
    }

    // The fitted control variate may do little on top of conditioning for
    // some parameter sets, but the pilot split must never hurt materially.
    const CallPriceReport nocv =
        call_prices_from_aggregates(agg, 0, 0, strikes, p.rho, Estimator::Conditional, false);
    for (std::size_t i = 0; i < strikes.size(); ++i)
        CHECK(cond.calls[i].se < 1.05 * nocv.calls[i].se);
    // Conditioning alone already buys a solid factor over the plain
    // estimator at the money.
    CHECK(plain.calls[1].se > 1.5 * cond.calls[1].se);
}

TEST_CASE("smile report carries negative skew for negative rho") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    McConfig config;
    config.n_paths = 1 << 13;
    config.steps_per_year = 252;
    config.seed = 4;
    config.antithetic = true;
    const std::vector<double> mats = {0.25, 0.5};
    const std::vector<std::vector<double>> strikes = {{0.95, 1.0, 1.05}, {0.9, 1.0, 1.1}};
    const SmileReport report = spx_smile(p, curve, mats, strikes, config);

    REQUIRE(report.points.size() == 6);
    REQUIRE(report.forwards.size() == 2);
    for (const auto& f : report.forwards) CHECK(std::fabs(f.value - 1.0) < 4.0 * f.se);
    for (const auto& pt : report.points) {
        CHECK(pt.ok);
        CHECK(pt.iv > 0.05);
        CHECK(pt.iv < 0.6);
        CHECK(pt.iv_se > 0.0);
        CHECK(pt.price_se > 0.0);
    }
    // Low strike trades over high strike in vol: the spot-vol correlation is
    // deeply negative and the noise at 8k paths is a fraction of a vol point.
    CHECK(report.points[0].iv > report.points[2].iv + 3.0 * report.points[0].iv_se);
    CHECK(report.points[3].iv > report.points[5].iv + 3.0 * report.points[3].iv_se);
    CHECK(report.config.n_paths == config.n_paths);
}
