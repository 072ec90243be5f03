#include "quintic/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quintic/errors.hpp"

namespace quintic {

namespace {

// (1 - exp(-a t)) / a, continuous at a = 0, evaluated without cancellation.
double one_minus_exp_over(double a, double t) {
    if (a == 0.0) return t;
    return -std::expm1(-a * t) / a;
}

}  // namespace

ModelParams make_params(double lambda_x, double lambda_y, double theta, double rho,
                        const std::array<double, 6>& alpha, bool require_martingale_safe) {
    if (!(lambda_x > 0.0) || !std::isfinite(lambda_x))
        throw InvalidInput("make_params: lambda_x must be positive");
    if (!(lambda_y > 0.0) || !std::isfinite(lambda_y))
        throw InvalidInput("make_params: lambda_y must be positive");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw InvalidInput("make_params: theta must lie in [0,1]");
    if (!(rho > -1.0 && rho < 1.0))
        throw InvalidInput("make_params: rho must lie in (-1,1)");
    for (double a : alpha)
        if (!std::isfinite(a)) throw InvalidInput("make_params: alpha must be finite");

    ModelParams p;
    p.lambda_x = lambda_x;
    p.lambda_y = lambda_y;
    p.theta = theta;
    p.rho = rho;
    p.alpha = alpha;
    p.martingale_safe = (alpha[5] > 0.0 && rho <= 0.0);
    if (require_martingale_safe && !p.martingale_safe)
        throw InvalidInput(
            "make_params: martingale condition requires alpha[5] > 0 and rho <= 0");
    return p;
}

ModelParams make_params(double lambda_x, double lambda_y, double theta, double rho,
                        const std::array<double, 5>& alpha_head,
                        bool require_martingale_safe) {
    std::array<double, 6> alpha{};
    std::copy(alpha_head.begin(), alpha_head.end(), alpha.begin());
    alpha[5] = 1.0;  // leading coefficient defaults to 1
    return make_params(lambda_x, lambda_y, theta, rho, alpha, require_martingale_safe);
}

ModelParams preset_params(const std::string& name) {
    // Calibrated parameter sets used by the CLI and the regression tests.
    if (name == "term-structure-2024")
        return make_params(33.754, 2.027, 0.678, -0.588,
                           std::array<double, 6>{0.0025, 0.009, -0.0594, -0.0328, 0.3239, 1.0});
    if (name == "joint-spxvix-2017")
        return make_params(31.8, 0.659, 0.964, -0.765,
                           std::array<double, 6>{0.0004, 0.0046, 0.0, 0.0096, 0.0, 1.0});
    if (name == "joint-spxvix-ssr-2017")
        return make_params(35.2, 0.623, 0.94, -0.769,
                           std::array<double, 6>{0.0004, 0.0038, 0.0004, 0.0085, 0.0005, 1.0});
    if (name == "stylized-facts-2024")
        return make_params(35.2, 0.623, 0.86, -0.7,
                           std::array<double, 6>{0.0509, 0.4475, 0.0504, 0.9981, 0.059, 1.0});
    throw InvalidInput("preset_params: unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() {
    return {"term-structure-2024", "joint-spxvix-2017", "joint-spxvix-ssr-2017",
            "stylized-facts-2024"};
}

double polynomial_value(const std::array<double, 6>& alpha, double z) {
    double acc = alpha[5];
    for (int k = 4; k >= 0; --k) acc = acc * z + alpha[static_cast<std::size_t>(k)];
    return acc;
}

std::array<double, 11> alpha_convolution(const std::array<double, 6>& alpha) {
    std::array<double, 11> conv{};
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) conv[i + j] += alpha[i] * alpha[j];
    return conv;
}

double gaussian_central_moment(double variance, int p) {
    if (p < 0 || p > 32) throw InvalidInput("gaussian_central_moment: order out of range");
    if (variance < 0.0) throw InvalidInput("gaussian_central_moment: negative variance");
    if (p == 0) return 1.0;
    if (p % 2 == 1) return 0.0;
    // (p-1)!! * variance^(p/2)
    double dfact = 1.0;
    for (int k = p - 1; k > 1; k -= 2) dfact *= static_cast<double>(k);
    return dfact * std::pow(variance, p / 2);
}

FactorCovariance state_covariance(const ModelParams& params, double t) {
    if (t < 0.0) throw InvalidInput("state_covariance: t must be nonnegative");
    FactorCovariance cov;
    cov.t = t;
    cov.xx = one_minus_exp_over(2.0 * params.lambda_x, t);
    cov.xy = one_minus_exp_over(params.lambda_x + params.lambda_y, t);
    cov.yy = one_minus_exp_over(2.0 * params.lambda_y, t);
    return cov;
}

double z_variance(const ModelParams& params, double t) {
    const FactorCovariance cov = state_covariance(params, t);
    const double th = params.theta;
    return th * th * cov.xx + 2.0 * th * (1.0 - th) * cov.xy + (1.0 - th) * (1.0 - th) * cov.yy;
}

double expected_p_squared(const ModelParams& params, double t) {
    const auto conv = alpha_convolution(params.alpha);
    const double var = z_variance(params, t);
    double acc = 0.0;
    for (int k = 0; k <= 10; ++k)
        acc += conv[static_cast<std::size_t>(k)] * gaussian_central_moment(var, k);
    return acc;
}

double h_decay(const ModelParams& params, double t, double s, double x, double y) {
    if (s < t) throw InvalidInput("h_decay: need s >= t");
    const double u = s - t;
    return params.theta * std::exp(-params.lambda_x * u) * x +
           (1.0 - params.theta) * std::exp(-params.lambda_y * u) * y;
}

double sigma_g_squared(const ModelParams& params, double t, double s) {
    if (s < t) throw InvalidInput("sigma_g_squared: need s >= t");
    const double u = s - t;
    const double th = params.theta;
    const double lx = params.lambda_x;
    const double ly = params.lambda_y;
    return th * th * one_minus_exp_over(2.0 * lx, u) +
           2.0 * th * (1.0 - th) * one_minus_exp_over(lx + ly, u) +
           (1.0 - th) * (1.0 - th) * one_minus_exp_over(2.0 * ly, u);
}

ForwardVarianceCurve::ForwardVarianceCurve(std::vector<double> knots,
                                           std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
    if (knots_.empty() || knots_.size() != values_.size())
        throw InvalidInput("ForwardVarianceCurve: knots/values size mismatch");
    if (knots_.front() != 0.0)
        throw InvalidInput("ForwardVarianceCurve: first knot must be 0");
    for (std::size_t i = 1; i < knots_.size(); ++i)
        if (!(knots_[i] > knots_[i - 1]))
            throw InvalidInput("ForwardVarianceCurve: knots must be strictly increasing");
    for (double v : values_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidInput("ForwardVarianceCurve: values must be positive");
}

ForwardVarianceCurve ForwardVarianceCurve::flat(double value) {
    return ForwardVarianceCurve({0.0}, {value});
}

double ForwardVarianceCurve::value(double t) const {
    if (t < 0.0) throw InvalidInput("ForwardVarianceCurve::value: t must be nonnegative");
    // Last knot <= t; right continuity means we take the interval starting at it.
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    const std::size_t idx = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return values_[idx];
}

double ForwardVarianceCurve::integral(double a, double b) const {
    if (a < 0.0 || b < a) throw InvalidInput("ForwardVarianceCurve::integral: need 0 <= a <= b");
    double acc = 0.0;
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        const double lo = std::max(a, knots_[i]);
        const double hi =
            (i + 1 < knots_.size()) ? std::min(b, knots_[i + 1]) : b;
        if (hi > lo) acc += values_[i] * (hi - lo);
    }
    return acc;
}

std::vector<double> simulate_z_pathdependent(const ModelParams& params,
                                             std::span<const double> dW, double h) {
    if (!(h > 0.0)) throw InvalidInput("simulate_z_pathdependent: h must be positive");
    const double th = params.theta;
    const double lx = params.lambda_x;
    const double ly = params.lambda_y;
    const double drift_z = -(lx * th + ly * (1.0 - th));
    const double coupling = th * (1.0 - th) * (ly - lx) * (ly - lx);
    const double kappa = lx * (1.0 - th) + ly * th;
    const double decay = std::exp(-kappa * h);
    const double hat_step = one_minus_exp_over(kappa, h);  // int_0^h exp(-kappa u) du

    std::vector<double> z(dW.size() + 1);
    z[0] = 0.0;
    double zhat = 0.0;
    for (std::size_t i = 0; i < dW.size(); ++i) {
        const double zi = z[i];
        z[i + 1] = zi + (drift_z * zi + coupling * zhat) * h + dW[i];
        // Exact decay of the memory integral, left-endpoint value for the load.
        zhat = decay * zhat + zi * hat_step;
    }
    return z;
}

}  // namespace quintic
