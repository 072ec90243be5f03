#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "quintic/cubature.hpp"
#include "quintic/errors.hpp"
#include "quintic/model.hpp"

using namespace quintic;

namespace {

// E[Z^p] for Z ~ N(0,1): zero for odd p, (p-1)!! for even p.
double std_normal_moment(int p) {
    if (p % 2 == 1) return 0.0;
    double acc = 1.0;
    for (int k = p - 1; k > 1; k -= 2) acc *= k;
    return acc;
}

double grid_moment(const GaussianGrid& g, int a, int b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.w[i] * std::pow(g.x[i], a) * std::pow(g.y[i], b);
    return acc;
}

double grid_abs_moment(const GaussianGrid& g, int a, int b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        acc += g.w[i] * std::pow(std::fabs(g.x[i]), a) * std::pow(std::fabs(g.y[i]), b);
    return acc;
}

}  // namespace

TEST_CASE("gauss-hermite tensor integrates bivariate monomials exactly") {
    const int order = 8;
    const GaussianGrid g = gauss_hermite_grid(order);
    REQUIRE(g.size() == 64);
    CHECK(grid_moment(g, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    for (int a = 0; a <= 2 * order - 1; ++a)
        for (int b = 0; b + a <= 2 * order - 1; ++b) {
            // Odd moments vanish by cancellation of terms as large as the
            // absolute moment, so that is the natural roundoff scale.
            const double err = std::fabs(grid_moment(g, a, b) -
                                         std_normal_moment(a) * std_normal_moment(b));
            CHECK(err < 1e-13 * (grid_abs_moment(g, a, b) + 1.0));
        }
    CHECK_THROWS_AS((void)gauss_hermite_grid(0), InvalidInput);
    CHECK_THROWS_AS((void)gauss_hermite_grid(65), InvalidInput);
}

TEST_CASE("quantizer grids load whitened") {
    for (int size : {100, 250, 500, 1000}) {
        const GaussianGrid g = load_grid(GridKind::Quantizer, size);
        REQUIRE(static_cast<int>(g.size()) == size);
        CHECK(g.kind == GridKind::Quantizer);
        CHECK(!g.correlated);
        CHECK(grid_moment(g, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
        // The shipped files are whitened at generation time, so first and
        // second moments match the standard normal to roundoff.
        CHECK(std::fabs(grid_moment(g, 1, 0)) < 1e-12);
        CHECK(std::fabs(grid_moment(g, 0, 1)) < 1e-12);
        CHECK(grid_moment(g, 2, 0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(grid_moment(g, 0, 2) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(grid_moment(g, 1, 1)) < 1e-12);
        for (double w : g.w) CHECK(w > 0.0);
    }
}

TEST_CASE("grid loading validates its arguments") {
    CHECK_THROWS_AS((void)load_grid(GridKind::GaussHermite, 20), InvalidInput);  // not a square
    CHECK_THROWS_AS((void)load_grid(GridKind::GaussHermite, 65 * 65), InvalidInput);
    CHECK_THROWS_AS((void)load_grid(GridKind::Quantizer, 123), IoError);  // no such file
    CHECK_THROWS_AS((void)load_grid(GridKind::Quantizer, 100, "/nonexistent"), IoError);
    CHECK_THROWS_AS((void)load_grid(GridKind::GaussHermite, 0), InvalidInput);
}

TEST_CASE("missing quantizer falls back to the nearest gauss-hermite tensor") {
    bool fell_back = false;
    const GaussianGrid g = load_grid_or_fallback(GridKind::Quantizer, 123, &fell_back);
    CHECK(fell_back);
    CHECK(g.kind == GridKind::GaussHermite);
    CHECK(g.size() == 144);  // 12^2 is the smallest square >= 123

    fell_back = true;
    const GaussianGrid q = load_grid_or_fallback(GridKind::Quantizer, 500, &fell_back);
    CHECK(!fell_back);
    CHECK(q.kind == GridKind::Quantizer);
    CHECK(q.size() == 500);
}

TEST_CASE("correlate maps the standard grid onto the requested law") {
    const GaussianGrid g = gauss_hermite_grid(12);
    const FactorCovariance cov{0.5, 0.8, -0.3, 0.6};
    const GaussianGrid m = correlate(g, cov);
    CHECK(m.correlated);
    REQUIRE(m.size() == g.size());
    // The tensor rule integrates quadratics exactly, so the mapped moments
    // equal the target covariance to roundoff.
    CHECK(std::fabs(grid_moment(m, 1, 0)) < 1e-14);
    CHECK(std::fabs(grid_moment(m, 0, 1)) < 1e-14);
    CHECK(grid_moment(m, 2, 0) == doctest::Approx(cov.xx).epsilon(1e-13));
    CHECK(grid_moment(m, 0, 2) == doctest::Approx(cov.yy).epsilon(1e-13));
    CHECK(grid_moment(m, 1, 1) == doctest::Approx(cov.xy).epsilon(1e-13));

    CHECK_THROWS_AS((void)correlate(m, cov), InvalidInput);
    CHECK_THROWS_AS((void)correlate(g, FactorCovariance{0.5, -1.0, 0.0, 1.0}), InvalidInput);
}

TEST_CASE("correlate handles degenerate covariances") {
    const GaussianGrid g = gauss_hermite_grid(6);

    // The time-zero state is a point mass at the origin.
    const GaussianGrid zero = correlate(g, FactorCovariance{0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < zero.size(); ++i) {
        CHECK(zero.x[i] == 0.0);
        CHECK(zero.y[i] == 0.0);
    }

    // Rank one: perfectly correlated factors land on the diagonal.
    const GaussianGrid diag = correlate(g, FactorCovariance{0.1, 1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < diag.size(); ++i)
        CHECK(diag.x[i] == doctest::Approx(diag.y[i]).epsilon(1e-13));
    CHECK(grid_moment(diag, 2, 0) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("swapping the covariance diagonal permutes the mapped tensor nodes") {
    // The symmetric square root commutes with the coordinate swap, which is
    // what makes factor relabeling an exact symmetry of grid pricing.  The
    // tensor node set is swap-closed, so the mapped sets must coincide.
    const GaussianGrid g = gauss_hermite_grid(5);
    const FactorCovariance cov{0.5, 0.8, -0.3, 0.6};
    const FactorCovariance swp{0.5, 0.6, -0.3, 0.8};
    const GaussianGrid a = correlate(g, cov);
    const GaussianGrid b = correlate(g, swp);
    const int n = 5;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // Node (i,j) of the tensor maps under the swapped law to the
            // coordinate swap of node (j,i) under the original law.
            const std::size_t ij = static_cast<std::size_t>(i * n + j);
            const std::size_t ji = static_cast<std::size_t>(j * n + i);
            CHECK(b.x[ij] == doctest::Approx(a.y[ji]).epsilon(1e-15));
            CHECK(b.y[ij] == doctest::Approx(a.x[ji]).epsilon(1e-15));
        }
}

TEST_CASE("pricing refuses an uncorrelated grid") {
    const ModelParams p =
        make_params(31.8, 0.659, 0.964, -0.765,
                    std::array<double, 5>{0.0004, 0.0046, 0.0, 0.0096, 0.0});
    const VixPolynomial poly =
        build_vix_polynomial(p, ForwardVarianceCurve::flat(0.03), 0.25);
    const GaussianGrid g = gauss_hermite_grid(8);
    CHECK_THROWS_AS((void)price_vix_payoff(poly, g, [](double v) { return v; }),
                    InvalidInput);
    CHECK_THROWS_AS((void)vix_call(poly, g, -1.0), InvalidInput);
}

TEST_CASE("quantizer and gauss-hermite futures agree to grid accuracy") {
    const ModelParams p =
        make_params(31.8, 0.659, 0.964, -0.765,
                    std::array<double, 5>{0.0004, 0.0046, 0.0, 0.0096, 0.0});
    const VixPolynomial poly =
        build_vix_polynomial(p, ForwardVarianceCurve::flat(0.03), 0.25);
    const double f_gh = vix_future(poly, gauss_hermite_grid(24));
    const double f_qu = vix_future(poly, load_grid(GridKind::Quantizer, 1000));
    // The quantizer is a 1000-cell approximation, not a spectral rule; 0.2%
    // agreement on the future is the expected ballpark.
    CHECK(f_qu == doctest::Approx(f_gh).epsilon(2e-3));
}
