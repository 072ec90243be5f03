// Generates the optimal-quantizer grids shipped in data/quantizers/.
//
// Lloyd iteration (k-means) on a fixed-seed sample of the standard 2-D
// normal, run to distortion convergence, followed by an exact affine moment
// correction so the grid's weighted mean is 0 and weighted covariance is
// the identity to machine precision.  The sample is point-symmetric (every
// draw enters with its mirror image), which removes odd-moment noise from
// the empirical measure.  Three deterministic initializations are tried and
// the lowest-distortion result kept; nearest-centroid queries go through a
// uniform bucket grid so large sample counts stay cheap.  Run from the repo
// root:
//
//     gen_quantizer <out_dir> [size...]      (default sizes 100 250 500 1000)
//
// Regenerating with the same build reproduces the shipped files byte for
// byte; the seed below is part of the data provenance.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "quintic/rng.hpp"

namespace {

constexpr std::uint64_t kSeed = 20240530;
constexpr int kDraws = 2000000;           // mirrored to 4M samples
constexpr int kSamples = 2 * kDraws;
constexpr int kMaxIters = 1000;
constexpr double kRelTol = 1e-12;         // distortion plateau => stop

struct Grid {
    std::vector<double> x, y, w;
};

// Uniform bucket index over [-lo, lo]^2, clamped at the edges.
struct Buckets {
    int b = 0;
    double lo = 0.0, h = 0.0;
    std::vector<std::vector<int>> cells;  // centroid ids per bucket

    explicit Buckets(int k) {
        b = std::max(8, static_cast<int>(2 * std::sqrt(static_cast<double>(k))));
        lo = 6.0;
        h = 2.0 * lo / b;
        cells.resize(static_cast<std::size_t>(b) * b);
    }
    int coord(double v) const {
        const int c = static_cast<int>((v + lo) / h);
        return std::clamp(c, 0, b - 1);
    }
    void rebuild(const std::vector<double>& cx, const std::vector<double>& cy) {
        for (auto& cell : cells) cell.clear();
        for (std::size_t j = 0; j < cx.size(); ++j)
            cells[static_cast<std::size_t>(coord(cy[j])) * b + coord(cx[j])].push_back(
                static_cast<int>(j));
    }
    // Exact nearest centroid: scan Chebyshev rings outward; any centroid in
    // ring r is at least (r-1)*h away, so the scan stops once that bound
    // exceeds the best distance found.
    int nearest(double px, double py, const std::vector<double>& cx,
                const std::vector<double>& cy) const {
        const int ix = coord(px), iy = coord(py);
        int best = -1;
        double best_d = 1e300;
        for (int r = 0;; ++r) {
            const double bound = (r - 1) * h;
            if (best >= 0 && bound * bound > best_d) break;
            bool any_cell = false;
            const int x0 = ix - r, x1 = ix + r, y0 = iy - r, y1 = iy + r;
            for (int gy = y0; gy <= y1; ++gy) {
                if (gy < 0 || gy >= b) continue;
                for (int gx = x0; gx <= x1; ++gx) {
                    if (gx < 0 || gx >= b) continue;
                    if (r > 0 && gx != x0 && gx != x1 && gy != y0 && gy != y1)
                        continue;  // interior of the ring, already scanned
                    any_cell = true;
                    for (int j : cells[static_cast<std::size_t>(gy) * b + gx]) {
                        const double dx = px - cx[static_cast<std::size_t>(j)];
                        const double dy = py - cy[static_cast<std::size_t>(j)];
                        const double d = dx * dx + dy * dy;
                        if (d < best_d) {
                            best_d = d;
                            best = j;
                        }
                    }
                }
            }
            if (!any_cell && r > 2 * b) break;  // everything clamped away
        }
        return best;
    }
};

struct LloydResult {
    Grid grid;
    double distortion = 0.0;
    int iters = 0;
};

LloydResult lloyd(int k, const std::vector<double>& sx, const std::vector<double>& sy,
                  const std::vector<int>& init_ids) {
    std::vector<double> cx(static_cast<std::size_t>(k)), cy(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) {
        cx[static_cast<std::size_t>(j)] = sx[static_cast<std::size_t>(init_ids[j])];
        cy[static_cast<std::size_t>(j)] = sy[static_cast<std::size_t>(init_ids[j])];
    }

    Buckets buckets(k);
    std::vector<double> ax(static_cast<std::size_t>(k)), ay(static_cast<std::size_t>(k));
    std::vector<std::int64_t> count(static_cast<std::size_t>(k));
    std::vector<int> assign(static_cast<std::size_t>(kSamples));
    // Farthest assigned sample, used to reseed a centroid whose cell emptied.
    double prev_distortion = 1e300;
    double distortion = 0.0;
    int iter = 0;
    for (; iter < kMaxIters; ++iter) {
        buckets.rebuild(cx, cy);
        std::fill(ax.begin(), ax.end(), 0.0);
        std::fill(ay.begin(), ay.end(), 0.0);
        std::fill(count.begin(), count.end(), 0);
        distortion = 0.0;
        int far_sample = 0;
        double far_d = -1.0;
        for (int i = 0; i < kSamples; ++i) {
            const double px = sx[static_cast<std::size_t>(i)];
            const double py = sy[static_cast<std::size_t>(i)];
            const int j = buckets.nearest(px, py, cx, cy);
            assign[static_cast<std::size_t>(i)] = j;
            const double dx = px - cx[static_cast<std::size_t>(j)];
            const double dy = py - cy[static_cast<std::size_t>(j)];
            const double d = dx * dx + dy * dy;
            distortion += d;
            if (d > far_d) {
                far_d = d;
                far_sample = i;
            }
            ax[static_cast<std::size_t>(j)] += px;
            ay[static_cast<std::size_t>(j)] += py;
            ++count[static_cast<std::size_t>(j)];
        }
        distortion /= kSamples;
        for (int j = 0; j < k; ++j) {
            if (count[static_cast<std::size_t>(j)] == 0) {
                // Dead centroid: restart it on the worst-covered sample.
                cx[static_cast<std::size_t>(j)] = sx[static_cast<std::size_t>(far_sample)];
                cy[static_cast<std::size_t>(j)] = sy[static_cast<std::size_t>(far_sample)];
                continue;
            }
            cx[static_cast<std::size_t>(j)] =
                ax[static_cast<std::size_t>(j)] / count[static_cast<std::size_t>(j)];
            cy[static_cast<std::size_t>(j)] =
                ay[static_cast<std::size_t>(j)] / count[static_cast<std::size_t>(j)];
        }
        if (prev_distortion - distortion < kRelTol * distortion) {
            ++iter;
            break;
        }
        prev_distortion = distortion;
    }

    LloydResult out;
    out.grid.x = std::move(cx);
    out.grid.y = std::move(cy);
    out.grid.w.assign(static_cast<std::size_t>(k), 0.0);
    for (int i = 0; i < kSamples; ++i)
        out.grid.w[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] +=
            1.0 / kSamples;
    out.distortion = distortion;
    out.iters = iter;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: gen_quantizer <out_dir> [size...]\n");
        return 2;
    }
    const std::string out_dir = argv[1];
    std::vector<int> sizes;
    for (int a = 2; a < argc; ++a) sizes.push_back(std::atoi(argv[a]));
    if (sizes.empty()) sizes = {100, 250, 500, 1000};

    // Point-symmetric sample: draw 2M, append the mirror image of each.
    std::vector<double> sx(kSamples), sy(kSamples);
    for (int i = 0; i < kDraws; ++i) {
        const double x = quintic::normal_draw(kSeed, static_cast<std::uint64_t>(i), 0, 0);
        const double y = quintic::normal_draw(kSeed, static_cast<std::uint64_t>(i), 0, 1);
        sx[static_cast<std::size_t>(2 * i)] = x;
        sy[static_cast<std::size_t>(2 * i)] = y;
        sx[static_cast<std::size_t>(2 * i + 1)] = -x;
        sy[static_cast<std::size_t>(2 * i + 1)] = -y;
    }

    for (int k : sizes) {
        // Three deterministic starts: strided over the raw sample order,
        // strided over a radius-sorted order (spreads the tails), and
        // strided with an offset.  Keep the lowest-distortion fit.
        std::vector<int> by_radius(static_cast<std::size_t>(kSamples));
        std::iota(by_radius.begin(), by_radius.end(), 0);
        std::sort(by_radius.begin(), by_radius.end(), [&](int a, int b) {
            const double ra = sx[static_cast<std::size_t>(a)] * sx[static_cast<std::size_t>(a)] +
                              sy[static_cast<std::size_t>(a)] * sy[static_cast<std::size_t>(a)];
            const double rb = sx[static_cast<std::size_t>(b)] * sx[static_cast<std::size_t>(b)] +
                              sy[static_cast<std::size_t>(b)] * sy[static_cast<std::size_t>(b)];
            return ra < rb;
        });
        const int stride = kSamples / k;
        std::vector<std::vector<int>> inits(3, std::vector<int>(static_cast<std::size_t>(k)));
        for (int j = 0; j < k; ++j) {
            inits[0][static_cast<std::size_t>(j)] = j * stride;
            inits[1][static_cast<std::size_t>(j)] =
                by_radius[static_cast<std::size_t>(j) * static_cast<std::size_t>(stride) +
                          static_cast<std::size_t>(stride) / 2];
            inits[2][static_cast<std::size_t>(j)] = j * stride + stride / 3;
        }

        LloydResult best;
        best.distortion = 1e300;
        int total_iters = 0;
        for (const std::vector<int>& init : inits) {
            LloydResult run = lloyd(k, sx, sy, init);
            total_iters += run.iters;
            if (run.distortion < best.distortion) best = std::move(run);
        }
        Grid& g = best.grid;

        // Exact moment correction: whiten with the inverse Cholesky factor.
        double mx = 0.0, my = 0.0;
        for (std::size_t j = 0; j < g.w.size(); ++j) {
            mx += g.w[j] * g.x[j];
            my += g.w[j] * g.y[j];
        }
        double cxx = 0.0, cxy = 0.0, cyy = 0.0;
        for (std::size_t j = 0; j < g.w.size(); ++j) {
            const double dx = g.x[j] - mx;
            const double dy = g.y[j] - my;
            cxx += g.w[j] * dx * dx;
            cxy += g.w[j] * dx * dy;
            cyy += g.w[j] * dy * dy;
        }
        const double l11 = std::sqrt(cxx);
        const double l21 = cxy / l11;
        const double l22 = std::sqrt(cyy - l21 * l21);
        for (std::size_t j = 0; j < g.w.size(); ++j) {
            const double dx = g.x[j] - mx;
            const double dy = g.y[j] - my;
            const double ux = dx / l11;
            g.x[j] = ux;
            g.y[j] = (dy - l21 * ux) / l22;
        }

        const std::string path = out_dir + "/gaussian2d_n" + std::to_string(k) + ".csv";
        std::FILE* f = std::fopen(path.c_str(), "w");
        if (!f) {
            std::fprintf(stderr, "gen_quantizer: cannot write %s\n", path.c_str());
            return 1;
        }
        std::fprintf(f, "# standard 2-D normal quantizer, %d nodes\n", k);
        std::fprintf(f,
                     "# Lloyd to convergence on %d point-symmetric fixed-seed samples "
                     "(seed %" PRIu64 "), best of 3 starts, moment-corrected\n",
                     kSamples, kSeed);
        std::fprintf(f, "x,y,w\n");
        for (std::size_t j = 0; j < g.w.size(); ++j)
            std::fprintf(f, "%.17g,%.17g,%.17g\n", g.x[j], g.y[j], g.w[j]);
        std::fclose(f);
        std::printf("wrote %s  distortion %.6e  iters %d\n", path.c_str(),
                    best.distortion, total_iters);
        std::fflush(stdout);
    }
    return 0;
}
