#pragma once

// Joint calibration to SPX smiles, VIX smiles, VIX futures and an SSR
// interval penalty.
//
// The objective is deterministic: every candidate evaluation reuses the same
// Monte Carlo seeds, so the loss surface is a fixed (noisy-looking but
// frozen) function and a derivative-free simplex search applies.  Quotes
// enter through bid/ask corridors: a model vol inside the corridor costs
// nothing, outside it costs the squared distance to the nearest bound, which
// is how fit quality is judged visually (curve threading the quotes) and is
// robust to wide far-wing corridors.

#include <cstdint>
#include <optional>
#include <vector>

#include "quintic/cubature.hpp"
#include "quintic/mc.hpp"
#include "quintic/model.hpp"
#include "quintic/ssr.hpp"

namespace quintic {

struct Quote {
    double maturity = 0.0;
    double strike = 0.0;
    double bid_iv = 0.0;
    double ask_iv = 0.0;
};

struct QuoteSet {
    std::vector<Quote> quotes;
};

struct FuturesQuote {
    double maturity = 0.0;
    double price = 0.0;
};

// Total variance point: E[int_0^T sigma^2 dt] observed at maturity T.
struct VarswapPoint {
    double maturity = 0.0;
    double total_variance = 0.0;
};

struct BlockWeights {
    double spx = 1.0;
    double vix = 1.0;
    double futures = 5.0;
    double ssr = 10.0;
};

struct CalibrationTarget {
    QuoteSet spx;
    QuoteSet vix;
    std::vector<FuturesQuote> futures;
    std::vector<VarswapPoint> varswaps;
    double ssr_lo = 0.9;
    double ssr_hi = 2.0;
    BlockWeights weights;
};

// Piecewise-constant xi0 from a variance-swap term structure: consecutive
// differences of total variance divided by interval lengths.  A decreasing
// total variance is calendar arbitrage and throws InvalidInput naming the
// offending pair of maturities.
ForwardVarianceCurve bootstrap_forward_variance(std::span<const VarswapPoint> varswaps);

// Corridor loss over matched (maturity, strike) keys, in raw vol units (a
// 0.01 breach costs 1e-4 * weight).  Model points whose implied vol
// inversion failed count as a 0.10 breach so the objective stays finite but
// strongly repelled.  Throws InvalidInput when no quote matches any model
// point.
double smile_loss(const std::vector<SmilePoint>& model, const QuoteSet& target,
                  double weight);

// Squared relative price errors, weighted.
double futures_loss(std::span<const double> model_prices,
                    std::span<const FuturesQuote> market, double weight);

// weight * sum of squared hinge distances to [lo, hi].
double ssr_penalty(const SsrReport& report, double lo, double hi, double weight);

enum class Xi0Mode {
    Fixed,         // keep the caller's curve
    FromVarswaps,  // bootstrap once from target.varswaps, then keep fixed
    FreeLevels,    // calibrate piecewise-constant levels jointly with params
};

struct ParamMask {
    bool lambda_x = true;
    bool lambda_y = true;
    bool theta = true;
    bool rho = true;
    // alpha[0..4]; alpha[5] is pinned at 1 by construction.  Freezing
    // alpha[2] and alpha[4] (at their initial values) is the usual reduced
    // parametrization for joint fits.
    std::array<bool, 5> alpha{true, true, true, true, true};
};

struct SsrPenaltySettings {
    bool enabled = false;
    std::vector<double> maturities;
    double epsilon = 1e-2;
    McConfig mc;  // usually lighter than the pricing config
};

struct CalibrationConfig {
    ParamMask mask;
    int budget = 2000;    // objective evaluations, all restarts included
    int restarts = 5;
    double initial_step = 0.25;  // simplex edge in transformed coordinates
    McConfig mc;                 // SPX pricing; seed frozen across evaluations
    GridKind vix_grid_kind = GridKind::GaussHermite;
    int vix_grid_size = 256;
    std::string grid_data_dir;   // empty = default
    int vix_quad_nodes = 64;
    SsrPenaltySettings ssr;
    Xi0Mode xi0_mode = Xi0Mode::Fixed;
    std::vector<double> xi0_knots = {0.0, 0.5, 1.0};  // FreeLevels only
};

struct BlockLosses {
    double spx = 0.0;
    double vix = 0.0;
    double futures = 0.0;
    double ssr = 0.0;
    double total() const { return spx + vix + futures + ssr; }
};

struct CalibrationResult {
    ModelParams params;
    ForwardVarianceCurve curve = ForwardVarianceCurve::flat(0.04);
    double loss = 0.0;
    BlockLosses blocks;
    std::vector<double> trace;  // loss per evaluation, in evaluation order
    int n_evals = 0;
    int restarts_used = 0;
    std::uint64_t seed = 0;
    std::vector<SsrPoint> ssr_diag;  // present when the penalty was enabled
};

// Derivative-free minimization (Nelder-Mead with oriented restarts) over
// box-transformed parameters: log for the lambdas and xi0 levels, logit for
// theta and (rho+1)/2, raw for the alphas.  Throws NumericFailure if no
// candidate in the budget evaluates cleanly (the message carries the best
// infeasible diagnostics).
CalibrationResult calibrate(const CalibrationTarget& target, const ModelParams& initial,
                            const ForwardVarianceCurve& initial_curve,
                            const CalibrationConfig& config);

}  // namespace quintic
