#include "quintic/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "quintic/errors.hpp"
#include "quintic/implied_vol.hpp"
#include "quintic/vix.hpp"

namespace quintic {

ForwardVarianceCurve bootstrap_forward_variance(std::span<const VarswapPoint> varswaps) {
    if (varswaps.empty())
        throw InvalidInput("bootstrap_forward_variance: empty term structure");
    std::vector<double> knots{0.0};
    std::vector<double> values;
    double prev_t = 0.0;
    double prev_v = 0.0;
    for (const VarswapPoint& point : varswaps) {
        if (!(point.maturity > prev_t))
            throw InvalidInput(
                "bootstrap_forward_variance: maturities must be positive and ascending");
        if (point.total_variance < prev_v)
            throw InvalidInput(
                "bootstrap_forward_variance: total variance decreases between T = " +
                std::to_string(prev_t) + " (" + std::to_string(prev_v) + ") and T = " +
                std::to_string(point.maturity) + " (" + std::to_string(point.total_variance) +
                "): calendar arbitrage");
        const double level = (point.total_variance - prev_v) / (point.maturity - prev_t);
        if (!(level > 0.0))
            throw InvalidInput(
                "bootstrap_forward_variance: zero forward variance on [" +
                std::to_string(prev_t) + ", " + std::to_string(point.maturity) + "]");
        values.push_back(level);
        if (&point != &varswaps.back()) knots.push_back(point.maturity);
        prev_t = point.maturity;
        prev_v = point.total_variance;
    }
    return ForwardVarianceCurve(std::move(knots), std::move(values));
}

double smile_loss(const std::vector<SmilePoint>& model, const QuoteSet& target,
                  double weight) {
    if (weight < 0.0) throw InvalidInput("smile_loss: weight must be nonnegative");
    // Implied vol that failed to invert is treated as this corridor breach.
    constexpr double kFailedDist = 0.10;

    double loss = 0.0;
    std::size_t matched = 0;
    for (const Quote& quote : target.quotes) {
        if (quote.bid_iv > quote.ask_iv)
            throw InvalidInput("smile_loss: quote with bid above ask");
        const SmilePoint* hit = nullptr;
        for (const SmilePoint& point : model) {
            if (std::fabs(point.maturity - quote.maturity) <=
                    1e-9 * std::max(1.0, quote.maturity) &&
                std::fabs(point.strike - quote.strike) <= 1e-9 * std::max(1.0, quote.strike)) {
                hit = &point;
                break;
            }
        }
        if (!hit) continue;
        ++matched;
        double dist;
        if (!hit->ok || !std::isfinite(hit->iv)) {
            dist = kFailedDist;
        } else {
            dist = std::max(quote.bid_iv - hit->iv, 0.0) + std::max(hit->iv - quote.ask_iv, 0.0);
        }
        loss += dist * dist;
    }
    if (matched == 0)
        throw InvalidInput("smile_loss: no quote matches any model (maturity, strike)");
    return weight * loss;
}

double futures_loss(std::span<const double> model_prices,
                    std::span<const FuturesQuote> market, double weight) {
    if (model_prices.size() != market.size())
        throw InvalidInput("futures_loss: size mismatch");
    double loss = 0.0;
    for (std::size_t i = 0; i < market.size(); ++i) {
        if (!(market[i].price > 0.0))
            throw InvalidInput("futures_loss: market price must be positive");
        const double rel = (model_prices[i] - market[i].price) / market[i].price;
        loss += rel * rel;
    }
    return weight * loss;
}

double ssr_penalty(const SsrReport& report, double lo, double hi, double weight) {
    if (!(lo < hi)) throw InvalidInput("ssr_penalty: interval must satisfy lo < hi");
    double loss = 0.0;
    for (const SsrPoint& point : report.points) {
        const double hinge = std::max(lo - point.ssr, 0.0) + std::max(point.ssr - hi, 0.0);
        loss += hinge * hinge;
    }
    return weight * loss;
}

namespace {

constexpr double kInfeasible = 1e30;

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

enum class CoordKind { LogLambdaX, LogLambdaY, LogitTheta, LogitRho, Alpha, LogXiLevel };

struct Coord {
    CoordKind kind;
    int index = 0;  // alpha index or xi0 level index
};

struct ParamSpace {
    std::vector<Coord> coords;
    ModelParams base;                 // frozen values for masked-out params
    std::vector<double> xi_knots;     // FreeLevels mode
    std::vector<double> xi_base;      // initial levels
    Xi0Mode xi0_mode = Xi0Mode::Fixed;
    ForwardVarianceCurve fixed_curve = ForwardVarianceCurve::flat(0.04);

    std::vector<double> pack() const {
        std::vector<double> u;
        u.reserve(coords.size());
        for (const Coord& c : coords) {
            switch (c.kind) {
                case CoordKind::LogLambdaX: u.push_back(std::log(base.lambda_x)); break;
                case CoordKind::LogLambdaY: u.push_back(std::log(base.lambda_y)); break;
                case CoordKind::LogitTheta: u.push_back(logit(base.theta)); break;
                case CoordKind::LogitRho: u.push_back(logit(0.5 * (base.rho + 1.0))); break;
                case CoordKind::Alpha:
                    u.push_back(base.alpha[static_cast<std::size_t>(c.index)]);
                    break;
                case CoordKind::LogXiLevel:
                    u.push_back(std::log(xi_base[static_cast<std::size_t>(c.index)]));
                    break;
            }
        }
        return u;
    }

    std::pair<ModelParams, ForwardVarianceCurve> unpack(std::span<const double> u) const {
        double lx = base.lambda_x, ly = base.lambda_y, th = base.theta, rho = base.rho;
        std::array<double, 6> alpha = base.alpha;
        std::vector<double> levels = xi_base;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            switch (coords[i].kind) {
                case CoordKind::LogLambdaX: lx = std::exp(u[i]); break;
                case CoordKind::LogLambdaY: ly = std::exp(u[i]); break;
                case CoordKind::LogitTheta: th = sigmoid(u[i]); break;
                case CoordKind::LogitRho: rho = 2.0 * sigmoid(u[i]) - 1.0; break;
                case CoordKind::Alpha:
                    alpha[static_cast<std::size_t>(coords[i].index)] = u[i];
                    break;
                case CoordKind::LogXiLevel:
                    levels[static_cast<std::size_t>(coords[i].index)] = std::exp(u[i]);
                    break;
            }
        }
        ModelParams params = make_params(lx, ly, th, rho, alpha);
        if (xi0_mode == Xi0Mode::FreeLevels)
            return {params, ForwardVarianceCurve(xi_knots, levels)};
        return {params, fixed_curve};
    }
};

ParamSpace build_space(const CalibrationTarget& target, const ModelParams& initial,
                       const ForwardVarianceCurve& initial_curve,
                       const CalibrationConfig& config) {
    ParamSpace space;
    space.base = initial;
    space.xi0_mode = config.xi0_mode;

    if (config.mask.lambda_x) space.coords.push_back({CoordKind::LogLambdaX});
    if (config.mask.lambda_y) space.coords.push_back({CoordKind::LogLambdaY});
    if (config.mask.theta) {
        if (!(initial.theta > 0.0 && initial.theta < 1.0))
            throw InvalidInput("calibrate: free theta needs an interior starting value");
        space.coords.push_back({CoordKind::LogitTheta});
    }
    if (config.mask.rho) space.coords.push_back({CoordKind::LogitRho});
    for (int k = 0; k < 5; ++k)
        if (config.mask.alpha[static_cast<std::size_t>(k)])
            space.coords.push_back({CoordKind::Alpha, k});

    switch (config.xi0_mode) {
        case Xi0Mode::Fixed:
            space.fixed_curve = initial_curve;
            break;
        case Xi0Mode::FromVarswaps:
            if (target.varswaps.empty())
                throw InvalidInput("calibrate: xi0 mode 'varswaps' needs varswap data");
            space.fixed_curve = bootstrap_forward_variance(target.varswaps);
            break;
        case Xi0Mode::FreeLevels: {
            space.xi_knots = config.xi0_knots;
            if (space.xi_knots.empty() || space.xi_knots.front() != 0.0)
                throw InvalidInput("calibrate: xi0 knots must start at 0");
            for (std::size_t i = 0; i < space.xi_knots.size(); ++i) {
                space.xi_base.push_back(initial_curve.value(space.xi_knots[i]));
                space.coords.push_back({CoordKind::LogXiLevel, static_cast<int>(i)});
            }
            break;
        }
    }
    if (space.coords.empty()) throw InvalidInput("calibrate: no free parameters");
    return space;
}

// Quotes grouped by maturity, preserving first-seen maturity order.
struct QuoteGroups {
    std::vector<double> maturities;
    std::vector<std::vector<double>> strikes;
};

QuoteGroups group_quotes(const QuoteSet& set) {
    QuoteGroups groups;
    for (const Quote& quote : set.quotes) {
        if (!(quote.maturity > 0.0))
            throw InvalidInput("calibrate: quote maturities must be positive");
        auto it = std::find_if(groups.maturities.begin(), groups.maturities.end(),
                               [&](double m) { return m == quote.maturity; });
        if (it == groups.maturities.end()) {
            groups.maturities.push_back(quote.maturity);
            groups.strikes.emplace_back();
            it = groups.maturities.end() - 1;
        }
        groups.strikes[static_cast<std::size_t>(it - groups.maturities.begin())].push_back(
            quote.strike);
    }
    // Maturities must ascend for the simulation schedule.
    std::vector<std::size_t> order(groups.maturities.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return groups.maturities[a] < groups.maturities[b];
    });
    QuoteGroups sorted;
    for (std::size_t i : order) {
        sorted.maturities.push_back(groups.maturities[i]);
        sorted.strikes.push_back(groups.strikes[i]);
    }
    return sorted;
}

struct Objective {
    const CalibrationTarget* target = nullptr;
    const CalibrationConfig* config = nullptr;
    QuoteGroups spx;
    QuoteGroups vix;
    GaussianGrid grid;
    mutable std::string last_error;

    std::optional<BlockLosses> eval(const ModelParams& params,
                                    const ForwardVarianceCurve& curve,
                                    std::vector<SsrPoint>* ssr_out = nullptr) const {
        try {
            BlockLosses blocks;

            if (!spx.maturities.empty()) {
                const SmileReport report =
                    spx_smile(params, curve, spx.maturities, spx.strikes, config->mc);
                blocks.spx = smile_loss(report.points, target->spx, target->weights.spx);
            }

            if (!vix.maturities.empty() || !target->futures.empty()) {
                // One polynomial per distinct maturity serves both blocks.
                std::map<double, VixPolynomial> polys;
                for (double m : vix.maturities)
                    polys.emplace(m, build_vix_polynomial(params, curve, m,
                                                          config->vix_quad_nodes));
                for (const FuturesQuote& f : target->futures)
                    if (!polys.count(f.maturity))
                        polys.emplace(f.maturity,
                                      build_vix_polynomial(params, curve, f.maturity,
                                                           config->vix_quad_nodes));

                if (!vix.maturities.empty()) {
                    std::vector<SmilePoint> points;
                    for (std::size_t mi = 0; mi < vix.maturities.size(); ++mi) {
                        const VixPolynomial& poly = polys.at(vix.maturities[mi]);
                        const GaussianGrid mapped = correlate(grid, poly.covariance);
                        const double future = price_vix_payoff(
                            poly, mapped, [](double v) { return v; });
                        for (double strike : vix.strikes[mi]) {
                            SmilePoint point;
                            point.maturity = vix.maturities[mi];
                            point.strike = strike;
                            point.price = price_vix_payoff(poly, mapped, [strike](double v) {
                                return std::max(v - strike, 0.0);
                            });
                            try {
                                point.iv = implied_vol(point.price, future, strike,
                                                       poly.t, true);
                                point.ok = true;
                            } catch (const Error&) {
                                point.ok = false;
                            }
                            points.push_back(point);
                        }
                    }
                    blocks.vix = smile_loss(points, target->vix, target->weights.vix);
                }

                if (!target->futures.empty()) {
                    std::vector<double> prices;
                    for (const FuturesQuote& f : target->futures)
                        prices.push_back(vix_future(polys.at(f.maturity), grid));
                    blocks.futures =
                        futures_loss(prices, target->futures, target->weights.futures);
                }
            }

            if (config->ssr.enabled) {
                const SsrReport report = model_ssr(params, curve, config->ssr.maturities,
                                                   config->ssr.epsilon, config->ssr.mc);
                blocks.ssr =
                    ssr_penalty(report, target->ssr_lo, target->ssr_hi, target->weights.ssr);
                if (ssr_out) *ssr_out = report.points;
            }
            return blocks;
        } catch (const Error& err) {
            last_error = err.what();
            return std::nullopt;
        }
    }
};

}  // namespace

CalibrationResult calibrate(const CalibrationTarget& target, const ModelParams& initial,
                            const ForwardVarianceCurve& initial_curve,
                            const CalibrationConfig& config) {
    if (config.budget < 10) throw InvalidInput("calibrate: budget too small");
    if (config.restarts < 0) throw InvalidInput("calibrate: restarts must be nonnegative");
    if (!(target.ssr_lo < target.ssr_hi))
        throw InvalidInput("calibrate: ssr interval must satisfy lo < hi");
    if (config.ssr.enabled && config.ssr.maturities.empty())
        throw InvalidInput("calibrate: ssr penalty enabled without maturities");

    const ParamSpace space = build_space(target, initial, initial_curve, config);

    Objective objective;
    objective.target = &target;
    objective.config = &config;
    objective.spx = group_quotes(target.spx);
    objective.vix = group_quotes(target.vix);
    objective.grid = load_grid(config.vix_grid_kind, config.vix_grid_size,
                               config.grid_data_dir);

    CalibrationResult result;
    result.seed = config.mc.seed;

    int evals = 0;
    bool any_feasible = false;
    std::vector<double> best_u = space.pack();
    double best_f = kInfeasible;

    auto f_eval = [&](std::span<const double> u) {
        // Candidates at transform extremes (sigmoid saturating to exactly 1,
        // overflowing exp) fail parameter validation; score them infeasible
        // instead of letting the exception escape the search.
        double loss = kInfeasible;
        try {
            const auto [params, curve] = space.unpack(u);
            const std::optional<BlockLosses> blocks = objective.eval(params, curve);
            if (blocks) {
                loss = blocks->total();
                any_feasible = true;
            }
        } catch (const Error& err) {
            objective.last_error = err.what();
        }
        ++evals;
        result.trace.push_back(loss);
        if (loss < best_f) {
            best_f = loss;
            best_u.assign(u.begin(), u.end());
        }
        return loss;
    };

    const std::size_t dim = space.coords.size();
    std::vector<double> orient(dim, 1.0);
    std::vector<double> restart_anchor = best_u;

    for (int round = 0; round <= config.restarts && evals < config.budget; ++round) {
        const double step = config.initial_step * std::pow(0.5, round);
        // Simplex seeded at the incumbent, oriented along the last
        // improvement direction.
        std::vector<std::vector<double>> pts;
        std::vector<double> fv;
        pts.push_back(best_u);
        fv.push_back(round == 0 ? f_eval(best_u) : best_f);
        for (std::size_t i = 0; i < dim && evals < config.budget; ++i) {
            std::vector<double> x = pts[0];
            x[i] += step * orient[i];
            pts.push_back(x);
            fv.push_back(f_eval(x));
        }
        if (pts.size() < dim + 1) break;  // budget died mid-simplex

        while (evals < config.budget && best_f > 0.0) {
            // Order: best first, worst last.
            std::vector<std::size_t> order(pts.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            std::vector<std::vector<double>> sp;
            std::vector<double> sf;
            for (std::size_t i : order) {
                sp.push_back(pts[i]);
                sf.push_back(fv[i]);
            }
            pts = std::move(sp);
            fv = std::move(sf);

            // Convergence: restart when the simplex collapsed.
            double fspread = std::fabs(fv.back() - fv.front());
            double xspread = 0.0;
            for (std::size_t i = 1; i < pts.size(); ++i)
                for (std::size_t d = 0; d < dim; ++d)
                    xspread = std::max(xspread, std::fabs(pts[i][d] - pts[0][d]));
            if (fspread <= 1e-12 * (1.0 + std::fabs(fv[0])) && xspread <= 1e-9) break;

            std::vector<double> centroid(dim, 0.0);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i)
                for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[i][d];
            for (std::size_t d = 0; d < dim; ++d)
                centroid[d] /= static_cast<double>(pts.size() - 1);

            auto blend = [&](double coef) {
                std::vector<double> x(dim);
                for (std::size_t d = 0; d < dim; ++d)
                    x[d] = centroid[d] + coef * (pts.back()[d] - centroid[d]);
                return x;
            };

            const std::vector<double> refl = blend(-1.0);
            const double f_refl = f_eval(refl);
            if (f_refl < fv[0]) {
                if (evals < config.budget) {
                    const std::vector<double> expa = blend(-2.0);
                    const double f_expa = f_eval(expa);
                    if (f_expa < f_refl) {
                        pts.back() = expa;
                        fv.back() = f_expa;
                        continue;
                    }
                }
                pts.back() = refl;
                fv.back() = f_refl;
                continue;
            }
            if (f_refl < fv[fv.size() - 2]) {
                pts.back() = refl;
                fv.back() = f_refl;
                continue;
            }
            if (evals >= config.budget) break;
            const bool outside = f_refl < fv.back();
            const std::vector<double> contr = blend(outside ? -0.5 : 0.5);
            const double f_contr = f_eval(contr);
            if (f_contr < std::min(f_refl, fv.back())) {
                pts.back() = contr;
                fv.back() = f_contr;
                continue;
            }
            // Shrink toward the best vertex.
            for (std::size_t i = 1; i < pts.size() && evals < config.budget; ++i) {
                for (std::size_t d = 0; d < dim; ++d)
                    pts[i][d] = pts[0][d] + 0.5 * (pts[i][d] - pts[0][d]);
                fv[i] = f_eval(pts[i]);
            }
        }

        result.restarts_used = round;
        if (best_f == 0.0) break;
        for (std::size_t d = 0; d < dim; ++d) {
            const double move = best_u[d] - restart_anchor[d];
            orient[d] = move > 0.0 ? 1.0 : (move < 0.0 ? -1.0 : orient[d]);
        }
        restart_anchor = best_u;
    }

    if (!any_feasible)
        throw NumericFailure("calibrate: no feasible evaluation within budget of " +
                             std::to_string(config.budget) + " (last error: " +
                             (objective.last_error.empty() ? "none" : objective.last_error) +
                             ")");

    // Recompute at the incumbent so reported blocks match the loss exactly.
    auto [params, curve] = space.unpack(best_u);
    std::vector<SsrPoint> ssr_diag;
    const std::optional<BlockLosses> blocks = objective.eval(params, curve, &ssr_diag);
    if (!blocks)
        throw NumericFailure("calibrate: best point failed to re-evaluate");
    result.params = params;
    result.curve = curve;
    result.blocks = *blocks;
    result.loss = blocks->total();
    result.n_evals = evals;
    result.ssr_diag = std::move(ssr_diag);
    return result;
}

}  // namespace quintic
