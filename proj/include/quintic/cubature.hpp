#pragma once

// Deterministic pricing of VIX derivatives: expectations of functions of the
// bivariate Gaussian state are computed on a fixed grid of nodes and weights.
// Two families are supported: optimal quantizer grids of the standard 2-D
// normal (shipped as CSV files, see data/quantizers/) and tensorised
// Gauss-Hermite, which is always available and is the fallback when a
// quantizer of the requested size is not on disk.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "quintic/model.hpp"
#include "quintic/vix.hpp"

namespace quintic {

enum class GridKind { Quantizer, GaussHermite };

struct GaussianGrid {
    GridKind kind = GridKind::GaussHermite;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;       // positive, sums to 1
    bool correlated = false;     // false: i.i.d. N(0,1) nodes; true: mapped to a state law
    std::size_t size() const { return w.size(); }
};

// Tensor product of the n-point Gauss-Hermite rule with itself (n^2 nodes).
GaussianGrid gauss_hermite_grid(int order);

// Directory the quantizer CSVs are read from: $QUINTIC_DATA_DIR when set,
// otherwise the location baked in at build time.
std::string default_data_dir();

// Loads a grid with `size` nodes.  Quantizer grids are read from
// "<dir>/quantizers/gaussian2d_n<size>.csv" (columns x,y,w); a missing or
// malformed file throws IoError.  For GridKind::GaussHermite, `size` must be
// a perfect square n^2 with n <= 64.
GaussianGrid load_grid(GridKind kind, int size, const std::string& dir = {});

// load_grid, except a quantizer that is not on disk degrades to the
// Gauss-Hermite tensor of the nearest size not below `size` instead of
// throwing.  `fell_back` reports when that happened so callers can warn.
GaussianGrid load_grid_or_fallback(GridKind kind, int size, bool* fell_back,
                                   const std::string& dir = {});

// Maps i.i.d. standard normal nodes to the law of (X_t, Y_t) through the
// symmetric square root of the covariance (closed form for 2x2; exact for
// singular matrices, and the t = 0 state maps every node to the origin).
// The symmetric root is used instead of Cholesky so that relabeling the two
// factors permutes the mapped nodes rather than rotating them.
GaussianGrid correlate(const GaussianGrid& grid, const FactorCovariance& covariance);

// E[payoff(VIX_t)] over a grid already correlated to poly.covariance.
double price_vix_payoff(const VixPolynomial& poly, const GaussianGrid& correlated,
                        const std::function<double(double)>& payoff);

// Convenience pricers; these take the *standard* (uncorrelated) grid and
// apply correlate() internally.
double vix_future(const VixPolynomial& poly, const GaussianGrid& standard);
double vix_call(const VixPolynomial& poly, const GaussianGrid& standard, double strike);

// Black implied vols of calls at the given strikes, quoted on the VIX future
// with maturity poly.t.
std::vector<double> vix_smile(const VixPolynomial& poly, const GaussianGrid& standard,
                              std::span<const double> strikes);

}  // namespace quintic
