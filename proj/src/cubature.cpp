#include "quintic/cubature.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "quintic/errors.hpp"
#include "quintic/implied_vol.hpp"
#include "quintic/quadrature.hpp"

#ifndef QUINTIC_DATA_DIR
#define QUINTIC_DATA_DIR "./data"
#endif

namespace quintic {

GaussianGrid gauss_hermite_grid(int order) {
    if (order < 1 || order > 64)
        throw InvalidInput("gauss_hermite_grid: order must lie in [1,64]");
    const QuadratureRule rule = gauss_hermite_normal(order);
    GaussianGrid grid;
    grid.kind = GridKind::GaussHermite;
    const std::size_t n = static_cast<std::size_t>(order);
    grid.x.reserve(n * n);
    grid.y.reserve(n * n);
    grid.w.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            grid.x.push_back(rule.nodes[i]);
            grid.y.push_back(rule.nodes[j]);
            grid.w.push_back(rule.weights[i] * rule.weights[j]);
        }
    return grid;
}

std::string default_data_dir() {
    if (const char* env = std::getenv("QUINTIC_DATA_DIR"); env && *env) return env;
    return QUINTIC_DATA_DIR;
}

namespace {

GaussianGrid load_quantizer_csv(const std::string& path, int expected_size) {
    std::ifstream in(path);
    if (!in) throw IoError("load_grid: cannot open quantizer file " + path);

    GaussianGrid grid;
    grid.kind = GridKind::Quantizer;
    std::string line;
    double wsum = 0.0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("x,", 0) == 0) continue;  // header row
        std::istringstream row(line);
        double x, y, w;
        char c1, c2;
        if (!(row >> x >> c1 >> y >> c2 >> w) || c1 != ',' || c2 != ',')
            throw IoError("load_grid: malformed row in " + path + ": '" + line + "'");
        if (!(w > 0.0) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(w))
            throw IoError("load_grid: bad node in " + path);
        grid.x.push_back(x);
        grid.y.push_back(y);
        grid.w.push_back(w);
        wsum += w;
    }
    if (static_cast<int>(grid.size()) != expected_size)
        throw IoError("load_grid: " + path + " holds " + std::to_string(grid.size()) +
                      " nodes, expected " + std::to_string(expected_size));
    if (std::fabs(wsum - 1.0) > 1e-6)
        throw IoError("load_grid: weights in " + path + " sum to " + std::to_string(wsum));
    for (double& w : grid.w) w /= wsum;
    return grid;
}

int gh_order_for_at_least(int size) {
    int order = 1;
    while (order * order < size && order < 64) ++order;
    return order;
}

}  // namespace

GaussianGrid load_grid(GridKind kind, int size, const std::string& dir) {
    if (size < 1) throw InvalidInput("load_grid: size must be positive");
    if (kind == GridKind::GaussHermite) {
        const int order = static_cast<int>(std::lround(std::sqrt(static_cast<double>(size))));
        if (order * order != size || order > 64)
            throw InvalidInput(
                "load_grid: Gauss-Hermite size must be a perfect square n^2, n <= 64");
        return gauss_hermite_grid(order);
    }
    const std::string base = dir.empty() ? default_data_dir() : dir;
    return load_quantizer_csv(base + "/quantizers/gaussian2d_n" + std::to_string(size) + ".csv",
                              size);
}

GaussianGrid load_grid_or_fallback(GridKind kind, int size, bool* fell_back,
                                   const std::string& dir) {
    if (fell_back) *fell_back = false;
    if (kind == GridKind::GaussHermite) return load_grid(kind, size, dir);
    try {
        return load_grid(kind, size, dir);
    } catch (const IoError&) {
        if (fell_back) *fell_back = true;
        return gauss_hermite_grid(gh_order_for_at_least(size));
    }
}

GaussianGrid correlate(const GaussianGrid& grid, const FactorCovariance& covariance) {
    if (grid.correlated) throw InvalidInput("correlate: grid is already correlated");
    const double xx = covariance.xx;
    const double xy = covariance.xy;
    const double yy = covariance.yy;
    if (xx < 0.0 || yy < 0.0)
        throw InvalidInput("correlate: covariance diagonal must be nonnegative");

    // Symmetric PSD square root, closed form for 2x2 (Cayley-Hamilton):
    //     sqrt(S) = (S + sqrt(det) I) / sqrt(trace + 2 sqrt(det)).
    // Chosen over Cholesky because it commutes with relabeling the factors,
    // so swapping (theta, lambda_x, lambda_y) -> (1-theta, lambda_y,
    // lambda_x) permutes the mapped nodes instead of rotating them.
    const double det = std::max(xx * yy - xy * xy, 0.0);
    const double s = std::sqrt(det);
    const double trace = xx + yy;
    const double t = std::sqrt(trace + 2.0 * s);

    double m11 = 0.0, m12 = 0.0, m22 = 0.0;
    if (t > 0.0) {
        m11 = (xx + s) / t;
        m12 = xy / t;
        m22 = (yy + s) / t;
    }

    GaussianGrid out = grid;
    out.correlated = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double u = grid.x[i];
        const double v = grid.y[i];
        out.x[i] = m11 * u + m12 * v;
        out.y[i] = m12 * u + m22 * v;
    }
    return out;
}

double price_vix_payoff(const VixPolynomial& poly, const GaussianGrid& correlated,
                        const std::function<double(double)>& payoff) {
    if (!correlated.correlated)
        throw InvalidInput("price_vix_payoff: grid must be correlated to the state law");
    double acc = 0.0;
    for (std::size_t i = 0; i < correlated.size(); ++i)
        acc += correlated.w[i] * payoff(std::sqrt(vix_squared(poly, correlated.x[i],
                                                              correlated.y[i])));
    return acc;
}

namespace {

// A coefficient table produced with theta = 1 (or 0) carries exact zeros for
// every term involving the unused factor.  Pricing then integrates over the
// exact marginal of the live factor instead of spreading the nodes through
// the full 2-D map: the expectation is unchanged, and the result coincides
// with what a univariate implementation on the same one-dimensional rule
// would produce, which keeps the degenerate-mixing reductions exact rather
// than true only up to quadrature error.
GaussianGrid correlate_for(const VixPolynomial& poly, const GaussianGrid& standard) {
    bool uses_x = false, uses_y = false;
    for (int l = 0; l <= 10; ++l)
        for (int m = 0; m <= l; ++m) {
            if (poly.beta[static_cast<std::size_t>(beta_index(m, l))] == 0.0) continue;
            if (m > 0) uses_x = true;
            if (m < l) uses_y = true;
        }
    if (uses_x == uses_y) return correlate(standard, poly.covariance);
    if (standard.correlated) throw InvalidInput("correlate: grid is already correlated");
    GaussianGrid out = standard;
    out.correlated = true;
    const double sd = std::sqrt(uses_x ? poly.covariance.xx : poly.covariance.yy);
    for (std::size_t i = 0; i < standard.size(); ++i) {
        out.x[i] = uses_x ? sd * standard.x[i] : 0.0;
        out.y[i] = uses_y ? sd * standard.y[i] : 0.0;
    }
    return out;
}

}  // namespace

double vix_future(const VixPolynomial& poly, const GaussianGrid& standard) {
    const GaussianGrid mapped = correlate_for(poly, standard);
    return price_vix_payoff(poly, mapped, [](double vix) { return vix; });
}

double vix_call(const VixPolynomial& poly, const GaussianGrid& standard, double strike) {
    if (!(strike >= 0.0)) throw InvalidInput("vix_call: strike must be nonnegative");
    const GaussianGrid mapped = correlate_for(poly, standard);
    return price_vix_payoff(poly, mapped,
                            [strike](double vix) { return std::max(vix - strike, 0.0); });
}

std::vector<double> vix_smile(const VixPolynomial& poly, const GaussianGrid& standard,
                              std::span<const double> strikes) {
    const GaussianGrid mapped = correlate_for(poly, standard);
    const double future =
        price_vix_payoff(poly, mapped, [](double vix) { return vix; });
    std::vector<double> ivs;
    ivs.reserve(strikes.size());
    for (double strike : strikes) {
        const double price = price_vix_payoff(
            poly, mapped, [strike](double vix) { return std::max(vix - strike, 0.0); });
        ivs.push_back(implied_vol(price, future, strike, poly.t, /*is_call=*/true));
    }
    return ivs;
}

}  // namespace quintic
