#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "quintic/cubature.hpp"
#include "quintic/errors.hpp"
#include "quintic/model.hpp"
#include "quintic/quadrature.hpp"
#include "quintic/vix.hpp"

using namespace quintic;

namespace {

ModelParams demo_params() {
    return make_params(31.8, 0.659, 0.964, -0.765,
                       std::array<double, 5>{0.0004, 0.0046, 0.0, 0.0096, 0.0});
}

ModelParams swapped(const ModelParams& p) {
    std::array<double, 5> head;
    for (int i = 0; i < 5; ++i) head[static_cast<std::size_t>(i)] = p.alpha[static_cast<std::size_t>(i)];
    return make_params(p.lambda_y, p.lambda_x, 1.0 - p.theta, p.rho, head);
}

ForwardVarianceCurve two_knot_curve() {
    return ForwardVarianceCurve({0.0, 0.55, 0.8}, {0.02, 0.035, 0.05});
}

}  // namespace

TEST_CASE("g0 squared times expected p squared reproduces the curve") {
    const ModelParams p = demo_params();
    for (const auto& curve : {ForwardVarianceCurve::flat(0.03), two_knot_curve()}) {
        for (double t : {0.05, 0.3, 0.55, 0.7, 1.2}) {
            const double lhs = g0_squared(p, curve, t) * expected_p_squared(p, t);
            CHECK(lhs == doctest::Approx(curve.value(t)).epsilon(1e-13));
        }
    }
}

TEST_CASE("forward variance from the origin at time zero is the input curve") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = two_knot_curve();
    for (double s : {0.01, 0.2, 0.56, 0.9, 1.5})
        CHECK(forward_variance(p, curve, 0.0, s, 0.0, 0.0) ==
              doctest::Approx(curve.value(s)).epsilon(1e-12));
}

TEST_CASE("forward variance against direct quadrature of the conditional law") {
    // xi_t(s) given (x, y) is g0^2(s) E[p(N)^2] with N drawn from the
    // conditional Gaussian law of Z_s.  Recompute that expectation by
    // Gauss-Hermite instead of the moment recursion.
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = two_knot_curve();
    const QuadratureRule gh = gauss_hermite_normal(40);
    const double t = 0.25;
    for (double s : {0.25, 0.3, 0.6, 1.0}) {
        for (double x : {-0.8, 0.0, 1.3}) {
            const double y = 0.4 * x - 0.1;
            const double mean = h_decay(p, t, s, x, y);
            const double sd = std::sqrt(sigma_g_squared(p, t, s));
            double ep2 = 0.0;
            for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
                const double z = mean + sd * gh.nodes[i];
                const double pz = polynomial_value(p.alpha, z);
                ep2 += gh.weights[i] * pz * pz;
            }
            const double oracle = g0_squared(p, curve, s) * ep2;
            CHECK(forward_variance(p, curve, t, s, x, y) ==
                  doctest::Approx(oracle).epsilon(1e-11));
        }
    }
}

TEST_CASE("vix squared equals the window average of forward variance") {
    // The polynomial table is an analytic rearrangement of
    // (1e4 / delta) * int_t^{t+delta} xi_t(s) ds; recompute that integral by
    // brute-force composite Gauss-Legendre at fixed states and compare.
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = two_knot_curve();
    const double t = 0.52;  // window [0.52, ~0.602] straddles the 0.55 knot
    const VixPolynomial poly = build_vix_polynomial(p, curve, t);
    const QuadratureRule gl = gauss_legendre(32);
    // g0^2 jumps at the 0.55 curve knot inside the window, so the quadrature
    // panels must break there or they converge at the speed of the jump.
    const std::vector<double> cuts = {t, 0.55, t + poly.delta};
    for (double x : {-0.6, 0.0, 0.9}) {
        for (double y : {-0.4, 0.25}) {
            double integral = 0.0;
            const int panels = 32;
            for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
                for (int j = 0; j < panels; ++j) {
                    const double a = cuts[c] + (cuts[c + 1] - cuts[c]) * j / panels;
                    const double b = cuts[c] + (cuts[c + 1] - cuts[c]) * (j + 1) / panels;
                    integral += integrate_gl(
                        [&](double s) { return forward_variance(p, curve, t, s, x, y); }, a, b,
                        gl);
                }
            const double oracle = 1e4 / poly.delta * integral;
            CHECK(vix_squared(poly, x, y) == doctest::Approx(oracle).epsilon(1e-9));
        }
    }
}

TEST_CASE("expected vix squared matches the forward variance integral") {
    // Tower property: averaging the polynomial over the state law must give
    // (1e4 / delta) * int_t^{t+delta} xi0(s) ds exactly; a degree-10
    // polynomial is integrated without error by a 6-point tensor rule, so
    // the discrepancy is pure roundoff.
    const ModelParams p = demo_params();
    const GaussianGrid grid = gauss_hermite_grid(8);
    for (const auto& curve : {ForwardVarianceCurve::flat(0.03), two_knot_curve()}) {
        for (double t : {0.1, 0.5, 1.0}) {
            const VixPolynomial poly = build_vix_polynomial(p, curve, t);
            const GaussianGrid mapped = correlate(grid, poly.covariance);
            const double mean =
                price_vix_payoff(poly, mapped, [](double v) { return v * v; });
            const double oracle = 1e4 / poly.delta * curve.integral(t, t + poly.delta);
            CHECK(mean == doctest::Approx(oracle).epsilon(1e-10));
        }
    }
}

TEST_CASE("coefficient table converges fast in the per-piece node count") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = two_knot_curve();
    const VixPolynomial coarse = build_vix_polynomial(p, curve, 0.52, 16);
    const VixPolynomial fine = build_vix_polynomial(p, curve, 0.52, 64);
    for (int i = 0; i < 66; ++i)
        CHECK(coarse.beta[static_cast<std::size_t>(i)] ==
              doctest::Approx(fine.beta[static_cast<std::size_t>(i)])
                  .epsilon(1e-12)
                  .scale(std::fabs(fine.beta[0]) + 1.0));
}

TEST_CASE("theta = 1 collapses to a univariate polynomial in x") {
    std::array<double, 5> head{0.01, 0.1, 0.0, 0.2, 0.0};
    const ModelParams p = make_params(5.0, 0.8, 1.0, -0.5, head);
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.04);
    const VixPolynomial poly = build_vix_polynomial(p, curve, 0.25);
    for (int l = 0; l <= 10; ++l)
        for (int m = 0; m < l; ++m)
            CHECK(std::fabs(poly.beta[static_cast<std::size_t>(beta_index(m, l))]) < 1e-14);

    // With y absent from the table, the pricer integrates over the exact x
    // marginal, so the 2-D tensor grid must reproduce a 1-D rule of the same
    // order to roundoff.
    const GaussianGrid grid = gauss_hermite_grid(24);
    const double future = vix_future(poly, grid);
    const QuadratureRule gh = gauss_hermite_normal(24);
    const double sdx = std::sqrt(poly.covariance.xx);
    double oracle = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
        oracle += gh.weights[i] * std::sqrt(vix_squared(poly, sdx * gh.nodes[i], 0.0));
    CHECK(future == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("relabeling the factors leaves prices invariant") {
    const ModelParams p = demo_params();
    const ModelParams q = swapped(p);
    const ForwardVarianceCurve curve = two_knot_curve();
    const GaussianGrid grid = gauss_hermite_grid(16);
    for (double t : {1.0 / 12, 0.25, 0.75}) {
        const VixPolynomial pp = build_vix_polynomial(p, curve, t);
        const VixPolynomial pq = build_vix_polynomial(q, curve, t);
        // Coefficients swap the roles of x and y...
        for (int l = 0; l <= 10; ++l)
            for (int m = 0; m <= l; ++m)
                CHECK(pq.beta[static_cast<std::size_t>(beta_index(m, l))] ==
                      doctest::Approx(pp.beta[static_cast<std::size_t>(beta_index(l - m, l))])
                          .epsilon(1e-12)
                          .scale(std::fabs(pp.beta[0]) + 1.0));
        // ...and the state covariance swaps its diagonal.
        CHECK(pq.covariance.xx == doctest::Approx(pp.covariance.yy).epsilon(1e-14));
        CHECK(pq.covariance.yy == doctest::Approx(pp.covariance.xx).epsilon(1e-14));
        CHECK(pq.covariance.xy == doctest::Approx(pp.covariance.xy).epsilon(1e-14));

        const double fut_p = vix_future(pp, grid);
        const double fut_q = vix_future(pq, grid);
        CHECK(fut_q == doctest::Approx(fut_p).epsilon(1e-12));
        for (double strike_shift : {-2.0, 0.0, 3.0}) {
            const double k = fut_p + strike_shift;
            CHECK(vix_call(pq, grid, k) == doctest::Approx(vix_call(pp, grid, k)).epsilon(1e-11));
        }
    }
}

TEST_CASE("call prices are decreasing and convex in strike, smile is sane") {
    const ModelParams p = demo_params();
    const ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.03);
    const VixPolynomial poly = build_vix_polynomial(p, curve, 0.25);
    const GaussianGrid grid = gauss_hermite_grid(24);
    const double fut = vix_future(poly, grid);
    CHECK(fut > 5.0);   // a 3-ish vol-point floor would signal a unit slip
    CHECK(fut < 60.0);  // same for an absurd ceiling

    // Jensen: the future lies below the root of the second moment.
    const GaussianGrid mapped = correlate(grid, poly.covariance);
    const double second = price_vix_payoff(poly, mapped, [](double v) { return v * v; });
    CHECK(fut <= std::sqrt(second) + 1e-12);

    std::vector<double> strikes;
    for (int i = -4; i <= 6; ++i) strikes.push_back(fut + 2.0 * i);
    std::vector<double> calls;
    for (double k : strikes) calls.push_back(vix_call(poly, grid, k));
    for (std::size_t i = 1; i < calls.size(); ++i) CHECK(calls[i] < calls[i - 1]);
    for (std::size_t i = 1; i + 1 < calls.size(); ++i)
        CHECK(calls[i + 1] + calls[i - 1] - 2.0 * calls[i] > -1e-12);

    const std::vector<double> ivs = vix_smile(poly, grid, strikes);
    REQUIRE(ivs.size() == strikes.size());
    for (double iv : ivs) {
        CHECK(iv > 0.0);
        CHECK(iv < 3.0);
    }
}

TEST_CASE("vix squared clamps roundoff and rejects genuinely negative tables") {
    VixPolynomial poly;
    poly.t = 0.25;
    poly.delta = kVixWindowYears;
    poly.scale = 1e4 / poly.delta;
    poly.covariance = FactorCovariance{0.25, 1.0, 0.0, 1.0};
    poly.beta.fill(0.0);

    poly.beta[0] = -0.5e-10;
    CHECK(vix_squared(poly, 0.3, -0.2) == 0.0);

    poly.beta[0] = -1e-9;
    CHECK_THROWS_AS((void)vix_squared(poly, 0.3, -0.2), NumericFailure);
}
