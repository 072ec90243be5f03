#pragma once

// Monte Carlo engine.
//
// The factor pair (X, Y) and the Brownian increments of the common driver W
// have a jointly Gaussian one-step law that is known in closed form, so paths
// are simulated *exactly* on the time grid: per step we draw a 3-vector
// (dW, I_x, I_y) through the Cholesky factor of its covariance and update
//     X_{t+h} = exp(-lambda_x h) X_t + I_x   (same for Y).
// The only discretisation left anywhere is in time integrals of sigma, which
// use left-endpoint sums; with the exact state law the left rule makes
// E[int sigma^2 dt] computable in closed form, which is what the control
// variate relies on.
//
// Two front ends share the identical per-step arithmetic and random number
// addressing:
//   * PathBatch keeps full paths in memory (diagnostics, small studies);
//   * simulate_aggregates streams paths and keeps only the per-path
//     functionals pricing needs (int sigma dW, int sigma^2 dt, terminal
//     state, optional Euler log-spot), so path count is not memory-bound.
// A consistency test pins the two to produce the same numbers for the same
// seed.

#include <cstdint>
#include <span>
#include <vector>

#include "quintic/model.hpp"

namespace quintic {

enum class Estimator { Plain, Conditional };

struct McConfig {
    std::int64_t n_paths = 65536;
    int steps_per_year = 504;
    std::uint64_t seed = 1;
    bool antithetic = true;  // pairs (2j, 2j+1) share draws with flipped signs
    Estimator estimator = Estimator::Conditional;
};

// Uniform simulation grid: n_steps = ceil(horizon * steps_per_year), so the
// step is never longer than nominal and n_steps * h == horizon exactly.
struct SimGrid {
    double horizon = 0.0;
    int steps_per_year = 0;
    int n_steps = 0;
    double h = 0.0;
};

SimGrid make_grid(double horizon, int steps_per_year);

// Exact one-step law of (dW, I_x, I_y) for step length h, as the row-major
// 3x3 lower-triangular map applied to i.i.d. standard normals.  `floored`
// flags the eigenvalue-floor fallback for a covariance that lost positive
// definiteness beyond roundoff (practically only reachable through extreme
// lambda * h).
struct IncrementLaw {
    double h = 0.0;
    double map[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double decay_x = 0.0;  // exp(-lambda_x h)
    double decay_y = 0.0;
    bool floored = false;
};

IncrementLaw increment_law(const ModelParams& params, double h);

struct PathBatch {
    SimGrid grid;
    std::int64_t n_paths = 0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    // Row-major [path][step]; x, y, sigma, ivar have n_steps+1 columns, dw has
    // n_steps.  ivar is the left-rule running integral of sigma^2.
    std::vector<double> x, y, dw;
    std::vector<double> sigma, ivar;
    bool has_vol = false;
};

PathBatch simulate_factors(const ModelParams& params, const SimGrid& grid,
                           std::int64_t n_paths, std::uint64_t seed, bool antithetic);

// Adds sigma and its running squared integral to a factor batch.
void simulate_vol(const ModelParams& params, const ForwardVarianceCurve& curve,
                  PathBatch& batch);

struct PriceStats {
    double value = 0.0;
    double se = 0.0;
};

// Deterministic shift of the initial state, used for sensitivity runs that
// must reuse the same random numbers (common random numbers).
struct StateOffset {
    double x0 = 0.0;
    double y0 = 0.0;
};

struct AggregateBatch {
    std::vector<double> maturities;  // relative to t0, ascending
    std::int64_t n_paths = 0;
    int n_variants = 1;
    std::uint64_t seed = 0;
    bool antithetic = false;
    bool has_plain = false;
    double t0 = 0.0;
    std::vector<StateOffset> variants;
    // Layout [variant][maturity][path].
    std::vector<double> m_int;   // int sigma dW
    std::vector<double> v_int;   // int sigma^2 dt (left rule)
    std::vector<double> log_s;   // Euler log-spot, only when has_plain
    std::vector<double> x_end, y_end;
    // Exact expectation of v_int per (variant, maturity): the control
    // variate's known mean.
    std::vector<double> v_mean;

    std::size_t idx(int variant, int mat, std::int64_t path) const {
        return (static_cast<std::size_t>(variant) * maturities.size() +
                static_cast<std::size_t>(mat)) *
                   static_cast<std::size_t>(n_paths) +
               static_cast<std::size_t>(path);
    }
};

// Simulates all variants on shared draws and records aggregates at every
// maturity.  The grid is piecewise uniform: each inter-maturity segment gets
// round-to-nearest(segment * steps_per_year) steps (at least one), so all
// maturities land exactly on grid points.  `t0` offsets the deterministic
// time functions (forward variance lookups) without re-anchoring the state:
// the state at t0 is (x0, y0) of each variant.
AggregateBatch simulate_aggregates(const ModelParams& params,
                                   const ForwardVarianceCurve& curve,
                                   std::span<const double> maturities,
                                   const McConfig& config,
                                   std::span<const StateOffset> variants = {},
                                   double t0 = 0.0, bool with_plain = false);

struct CallPriceReport {
    std::vector<PriceStats> calls;  // per strike, undiscounted, S0 = 1
    PriceStats forward;             // E[S_T]; should be 1 within noise
};

// Prices calls from recorded aggregates.  The conditional estimator
// integrates the orthogonal Brownian analytically (Black price per path);
// the plain estimator uses the Euler log-spot (requires with_plain).  The
// control variate subtracts b * (v_int - E[v_int]) with b fitted on a pilot
// sub-sample per strike; b falls back to 0 when the vol integral is
// degenerate.  Standard errors treat an antithetic pair as one observation.
CallPriceReport call_prices_from_aggregates(const AggregateBatch& batch, int variant,
                                            int mat_index, std::span<const double> strikes,
                                            double rho, Estimator estimator,
                                            bool control_variate = true);

// Per-path conditional Black call prices for one strike, for estimators that
// difference paths between variants (bump-and-reprice with common random
// numbers) and therefore need more than a mean and a standard error.
std::vector<double> conditional_call_per_path(const AggregateBatch& batch, int variant,
                                              int mat_index, double strike, double rho);

// Mean and standard error of per-path values; an antithetic pair counts as
// one observation.
PriceStats reduce_mc(std::span<const double> per_path, bool antithetic);

// Full-path variant used in diagnostics; numbers match the streaming engine
// exactly for equal seed/grid.  Maturity is the batch horizon.
std::vector<PriceStats> spx_call_prices(const ModelParams& params,
                                        const ForwardVarianceCurve& curve,
                                        const PathBatch& batch,
                                        std::span<const double> strikes,
                                        Estimator estimator, bool control_variate = true);

struct SmilePoint {
    double maturity = 0.0;
    double strike = 0.0;
    double iv = 0.0;
    double iv_se = 0.0;
    double price = 0.0;
    double price_se = 0.0;
    bool ok = false;  // false when the implied vol inversion failed
};

struct SmileReport {
    std::vector<SmilePoint> points;       // maturity-major, strike order preserved
    std::vector<PriceStats> forwards;     // martingale diagnostic per maturity
    McConfig config;
};

// One simulation pass, all maturities and strikes.  Inversion failures are
// recorded per point, never thrown.
SmileReport spx_smile(const ModelParams& params, const ForwardVarianceCurve& curve,
                      const std::vector<double>& maturities,
                      const std::vector<std::vector<double>>& strikes,
                      const McConfig& config);

}  // namespace quintic
