#include "quintic/vix.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "quintic/errors.hpp"
#include "quintic/quadrature.hpp"

namespace quintic {

namespace {

// C(n, k) for n <= 10; exact in double.
double binom(int n, int k) {
    double acc = 1.0;
    for (int i = 1; i <= k; ++i) acc = acc * static_cast<double>(n - k + i) / i;
    return acc;
}

}  // namespace

double g0_squared(const ModelParams& params, const ForwardVarianceCurve& curve, double t) {
    const double ep2 = expected_p_squared(params, t);
    if (!(ep2 > 0.0))
        throw InvalidInput("g0_squared: E[p(Z_t)^2] vanishes, polynomial is degenerate");
    return curve.value(t) / ep2;
}

std::array<double, 11> gaussian_raw_moments(double mean, double variance) {
    if (variance < 0.0) throw InvalidInput("gaussian_raw_moments: negative variance");
    std::array<double, 11> m{};
    m[0] = 1.0;
    m[1] = mean;
    for (int k = 2; k <= 10; ++k)
        m[static_cast<std::size_t>(k)] = mean * m[static_cast<std::size_t>(k - 1)] +
                                          variance * static_cast<double>(k - 1) *
                                              m[static_cast<std::size_t>(k - 2)];
    return m;
}

double forward_variance(const ModelParams& params, const ForwardVarianceCurve& curve,
                        double t, double s, double x, double y) {
    if (s < t) throw InvalidInput("forward_variance: need s >= t");
    const double mean = h_decay(params, t, s, x, y);
    const double var = sigma_g_squared(params, t, s);
    const auto moments = gaussian_raw_moments(mean, var);
    const auto conv = alpha_convolution(params.alpha);
    double ep2 = 0.0;
    for (int k = 0; k <= 10; ++k) ep2 += conv[static_cast<std::size_t>(k)] * moments[static_cast<std::size_t>(k)];
    return g0_squared(params, curve, s) * ep2;
}

VixPolynomial build_vix_polynomial(const ModelParams& params,
                                   const ForwardVarianceCurve& curve, double t,
                                   int nodes, double delta) {
    if (t < 0.0) throw InvalidInput("build_vix_polynomial: t must be nonnegative");
    if (!(delta > 0.0)) throw InvalidInput("build_vix_polynomial: delta must be positive");
    if (nodes < 2 || nodes > 512)
        throw InvalidInput("build_vix_polynomial: nodes out of range");

    const double th = params.theta;
    const double lx = params.lambda_x;
    const double ly = params.lambda_y;
    const auto conv = alpha_convolution(params.alpha);

    // Integration pieces: [t, t+delta] split at the curve's interior knots.
    std::vector<double> cuts{t, t + delta};
    for (double k : curve.knots())
        if (k > t && k < t + delta) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());

    const QuadratureRule rule = gauss_legendre(nodes);

    // integral[idx(m,l)] accumulates
    //   int g0^2(s) K_l(s) exp(-(m lx + (l-m) ly)(s-t)) ds
    // with K_l(s) = sum_{k=l..10} conv_k C(k,l) m_{k-l}(sigma_g^2(t,s)).
    std::array<double, 66> integral{};
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
        const double a = cuts[piece];
        const double b = cuts[piece + 1];
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double s = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q];
            const double g2 = g0_squared(params, curve, s);
            const auto central = gaussian_raw_moments(0.0, sigma_g_squared(params, t, s));

            std::array<double, 11> k_sum{};
            for (int l = 0; l <= 10; ++l)
                for (int k = l; k <= 10; ++k)
                    k_sum[static_cast<std::size_t>(l)] +=
                        conv[static_cast<std::size_t>(k)] * binom(k, l) *
                        central[static_cast<std::size_t>(k - l)];

            // Power tables of the factor decays at this node.
            const double ex = std::exp(-lx * (s - t));
            const double ey = std::exp(-ly * (s - t));
            std::array<double, 11> ex_pow{}, ey_pow{};
            ex_pow[0] = ey_pow[0] = 1.0;
            for (int i = 1; i <= 10; ++i) {
                ex_pow[static_cast<std::size_t>(i)] = ex_pow[static_cast<std::size_t>(i - 1)] * ex;
                ey_pow[static_cast<std::size_t>(i)] = ey_pow[static_cast<std::size_t>(i - 1)] * ey;
            }

            for (int l = 0; l <= 10; ++l) {
                const double wl = w * g2 * k_sum[static_cast<std::size_t>(l)];
                for (int m = 0; m <= l; ++m)
                    integral[static_cast<std::size_t>(beta_index(m, l))] +=
                        wl * ex_pow[static_cast<std::size_t>(m)] *
                        ey_pow[static_cast<std::size_t>(l - m)];
            }
        }
    }

    VixPolynomial poly;
    poly.t = t;
    poly.delta = delta;
    poly.scale = 1e4 / delta;
    poly.covariance = state_covariance(params, t);
    std::array<double, 11> th_pow{}, om_pow{};
    th_pow[0] = om_pow[0] = 1.0;
    for (int i = 1; i <= 10; ++i) {
        th_pow[static_cast<std::size_t>(i)] = th_pow[static_cast<std::size_t>(i - 1)] * th;
        om_pow[static_cast<std::size_t>(i)] = om_pow[static_cast<std::size_t>(i - 1)] * (1.0 - th);
    }
    for (int l = 0; l <= 10; ++l)
        for (int m = 0; m <= l; ++m) {
            const auto idx = static_cast<std::size_t>(beta_index(m, l));
            poly.beta[idx] = binom(l, m) * th_pow[static_cast<std::size_t>(m)] *
                             om_pow[static_cast<std::size_t>(l - m)] * integral[idx];
            if (!std::isfinite(poly.beta[idx]))
                throw NumericFailure("build_vix_polynomial: non-finite coefficient");
        }
    return poly;
}

double vix_squared(const VixPolynomial& poly, double x, double y) {
    // Horner in x; the coefficient of x^m is itself a polynomial in y.
    std::array<double, 11> coeff_x{};
    for (int m = 0; m <= 10; ++m) {
        double acc = 0.0;
        for (int l = 10; l >= m; --l)
            acc = acc * y + poly.beta[static_cast<std::size_t>(beta_index(m, l))];
        coeff_x[static_cast<std::size_t>(m)] = acc;
    }
    double raw = 0.0;
    for (int m = 10; m >= 0; --m) raw = raw * x + coeff_x[static_cast<std::size_t>(m)];

    double value = poly.scale * raw;
    if (value < 0.0) {
        if (value >= -1e-10 * poly.scale) return 0.0;
        throw NumericFailure("vix_squared: polynomial evaluated significantly negative");
    }
    return value;
}

}  // namespace quintic
