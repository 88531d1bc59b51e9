#include "geodist/scan_parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "geodist/scan_serial.hpp"
#include "scan_common.hpp"

namespace geodist {

namespace {

using detail::CostKind;

// A pass offset resolved against the plane coordinate frame: `flat` is the
// full data-index delta (including the step into the previous plane), du/dv
// are the in-plane components used for bounds handling.
struct PassOffset {
    std::ptrdiff_t flat = 0;
    int du = 0;
    int dv = 0;
    double rho = 0.0;
    double c0 = 0.0;
};

struct PassGeom {
    int n_sweep = 0;  // extent along the swept axis
    std::ptrdiff_t stride_sweep = 0;
    int orientation = +1;
    int nu = 0;  // plane extents; u is the slower axis
    int nv = 0;
    std::ptrdiff_t su = 0;
    std::ptrdiff_t sv = 0;
};

// Relaxes [v0, v1) of one row. The row values accumulate in `best` so each
// offset contributes one clipped, check-free sweep; candidate order (k
// ascending) matches the naive per-element loop bit for bit. Reads touch
// only the previous plane through o.flat, so in-place updates are safe.
template <CostKind K, bool Contig>
void relax_row(float* dist, const float* img, std::ptrdiff_t row, std::ptrdiff_t sv,
               int v0, int v1, int nv, const PassOffset* offs, int n_offs, double lambda,
               double* best) {
    const int len = v1 - v0;
    for (int i = 0; i < len; ++i) {
        best[i] = dist[row + (Contig ? v0 + i : (v0 + i) * sv)];
    }
    for (int k = 0; k < n_offs; ++k) {
        const PassOffset& o = offs[k];
        const std::ptrdiff_t q_row = row + o.flat;
        const int lo = std::max(v0, o.dv > 0 ? 0 : -o.dv);
        const int hi = std::min(v1, o.dv > 0 ? nv - o.dv : nv);
        if constexpr (K == CostKind::Spatial) {
            const double rho = o.rho;
            for (int v = lo; v < hi; ++v) {
                const double cand =
                    static_cast<double>(dist[q_row + (Contig ? v : v * sv)]) + rho;
                best[v - v0] = std::min(best[v - v0], cand);
            }
        } else if constexpr (K == CostKind::Intensity) {
            for (int v = lo; v < hi; ++v) {
                const std::ptrdiff_t pv = Contig ? v : v * sv;
                const double di = static_cast<double>(img[row + pv]) -
                                  static_cast<double>(img[q_row + pv]);
                const double cand = static_cast<double>(dist[q_row + pv]) + std::abs(di);
                best[v - v0] = std::min(best[v - v0], cand);
            }
        } else {
            const double c0 = o.c0;
            for (int v = lo; v < hi; ++v) {
                const std::ptrdiff_t pv = Contig ? v : v * sv;
                const double di = static_cast<double>(img[row + pv]) -
                                  static_cast<double>(img[q_row + pv]);
                const double cand = static_cast<double>(dist[q_row + pv]) +
                                    std::sqrt(c0 + lambda * di * di);
                best[v - v0] = std::min(best[v - v0], cand);
            }
        }
    }
    for (int i = 0; i < len; ++i) {
        dist[row + (Contig ? v0 + i : (v0 + i) * sv)] = static_cast<float>(best[i]);
    }
}

template <CostKind K>
void run_pass(float* dist, const float* img, const PassGeom& g,
              std::span<const PassOffset> offsets, double lambda, int workers) {
    const int n_offs = static_cast<int>(offsets.size());

#pragma omp parallel num_threads(workers)
    {
        std::vector<double> best(static_cast<std::size_t>(g.nv));
        PassOffset row_offs[9];
        for (int step = 1; step < g.n_sweep; ++step) {
            const int s = g.orientation > 0 ? step : g.n_sweep - 1 - step;
            const std::ptrdiff_t plane_base = static_cast<std::ptrdiff_t>(s) * g.stride_sweep;
            if (g.nu > 1) {
#pragma omp for schedule(static)
                for (int u = 0; u < g.nu; ++u) {
                    int n_row = 0;
                    for (int k = 0; k < n_offs; ++k) {
                        const int uu = u + offsets[k].du;
                        if (uu >= 0 && uu < g.nu) row_offs[n_row++] = offsets[k];
                    }
                    const std::ptrdiff_t row = plane_base + static_cast<std::ptrdiff_t>(u) * g.su;
                    if (g.sv == 1) {
                        relax_row<K, true>(dist, img, row, 1, 0, g.nv, g.nv, row_offs, n_row,
                                           lambda, best.data());
                    } else {
                        relax_row<K, false>(dist, img, row, g.sv, 0, g.nv, g.nv, row_offs,
                                            n_row, lambda, best.data());
                    }
                }
                // implicit barrier: the plane is finalized before the sweep advances
            } else {
                const int nt = omp_get_num_threads();
                const int tid = omp_get_thread_num();
                const int chunk = (g.nv + nt - 1) / nt;
                const int v0 = std::min(g.nv, tid * chunk);
                const int v1 = std::min(g.nv, v0 + chunk);
                if (v0 < v1) {
                    int n_row = 0;
                    for (int k = 0; k < n_offs; ++k) {
                        if (offsets[k].du == 0) row_offs[n_row++] = offsets[k];
                    }
                    if (g.sv == 1) {
                        relax_row<K, true>(dist, img, plane_base, 1, v0, v1, g.nv, row_offs,
                                           n_row, lambda, best.data());
                    } else {
                        relax_row<K, false>(dist, img, plane_base, g.sv, v0, v1, g.nv,
                                            row_offs, n_row, lambda, best.data());
                    }
                }
#pragma omp barrier
            }
        }
    }
}

void dispatch_pass(float* dist, const float* img, const PassGeom& g,
                   std::span<const PassOffset> offsets, double lambda, int workers) {
    switch (detail::classify_cost(lambda)) {
        case CostKind::Spatial:
            run_pass<CostKind::Spatial>(dist, img, g, offsets, lambda, workers);
            break;
        case CostKind::Intensity:
            run_pass<CostKind::Intensity>(dist, img, g, offsets, lambda, workers);
            break;
        case CostKind::Blend:
            run_pass<CostKind::Blend>(dist, img, g, offsets, lambda, workers);
            break;
    }
}

PassGeom make_geom(const ScalarGrid& grid, PassDirection direction) {
    const std::ptrdiff_t strides[3] = {
        static_cast<std::ptrdiff_t>(grid.height()) * grid.width(), grid.width(), 1};
    const int extents[3] = {grid.depth(), grid.height(), grid.width()};

    PassGeom g;
    g.n_sweep = extents[direction.axis];
    g.stride_sweep = strides[direction.axis];
    g.orientation = direction.orientation;
    int axes[2];
    int n = 0;
    for (int axis = 0; axis < 3; ++axis) {
        if (axis != direction.axis) {
            axes[n++] = axis;
        }
    }
    g.nu = extents[axes[0]];
    g.su = strides[axes[0]];
    g.nv = extents[axes[1]];
    g.sv = strides[axes[1]];
    return g;
}

std::vector<PassOffset> make_pass_offsets(const ScalarGrid& grid, PassDirection direction,
                                          double lambda) {
    const auto neighbor = pass_neighbor_offsets(direction, grid.ndim(), grid.spacings());
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(grid.height()) * grid.width();
    const std::ptrdiff_t sy = grid.width();

    int axes[2];
    int n = 0;
    for (int axis = 0; axis < 3; ++axis) {
        if (axis != direction.axis) {
            axes[n++] = axis;
        }
    }
    std::vector<PassOffset> resolved;
    resolved.reserve(neighbor.size());
    for (const NeighborOffset& o : neighbor) {
        const int delta[3] = {o.dz, o.dy, o.dx};
        PassOffset p;
        p.flat = o.dz * sz + o.dy * sy + o.dx;
        p.du = delta[axes[0]];
        p.dv = delta[axes[1]];
        p.rho = o.rho;
        p.c0 = (1.0 - lambda) * o.rho * o.rho;
        resolved.push_back(p);
    }
    return resolved;
}

// Blocked 2D transpose: dst[c * rows + r] = src[r * cols + c]. Used to run
// the width-axis 3D passes on contiguous planes instead of stride-W columns.
void transpose2d(const float* src, float* dst, std::ptrdiff_t rows, std::ptrdiff_t cols,
                 int workers) {
    constexpr std::ptrdiff_t kTile = 32;
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::ptrdiff_t r0 = 0; r0 < rows; r0 += kTile) {
        for (std::ptrdiff_t c0 = 0; c0 < cols; c0 += kTile) {
            const std::ptrdiff_t r1 = std::min(rows, r0 + kTile);
            const std::ptrdiff_t c1 = std::min(cols, c0 + kTile);
            for (std::ptrdiff_t r = r0; r < r1; ++r) {
                for (std::ptrdiff_t c = c0; c < c1; ++c) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

// Runs one or two width-axis passes of a 3D grid in the transposed
// (x, z, y) layout, where each swept plane is a contiguous block.
void run_x3d_passes(ScalarGrid& dist, const ScalarGrid& image,
                    std::span<const int> orientations, const TransformParams& params,
                    int workers) {
    const int depth = image.depth();
    const int height = image.height();
    const int width = image.width();
    const std::ptrdiff_t plane = static_cast<std::ptrdiff_t>(depth) * height;
    const std::ptrdiff_t n = plane * width;

    std::vector<float> dist_t(n);
    std::vector<float> img_t;
    transpose2d(dist.data(), dist_t.data(), plane, width, workers);
    if (detail::classify_cost(params.lambda) != CostKind::Spatial) {
        img_t.resize(n);
        transpose2d(image.data(), img_t.data(), plane, width, workers);
    }

    PassGeom g;
    g.n_sweep = width;
    g.stride_sweep = plane;
    g.nu = depth;
    g.su = height;
    g.nv = height;
    g.sv = 1;

    for (int orientation : orientations) {
        g.orientation = orientation;
        const auto neighbor = pass_neighbor_offsets(PassDirection{2, orientation},
                                                    image.ndim(), image.spacings());
        std::vector<PassOffset> offsets;
        offsets.reserve(neighbor.size());
        for (const NeighborOffset& o : neighbor) {
            PassOffset p;
            p.flat = o.dx * plane + o.dz * height + o.dy;
            p.du = o.dz;
            p.dv = o.dy;
            p.rho = o.rho;
            p.c0 = (1.0 - params.lambda) * o.rho * o.rho;
            offsets.push_back(p);
        }
        dispatch_pass(dist_t.data(), img_t.data(), g, offsets, params.lambda, workers);
    }
    transpose2d(dist_t.data(), dist.data(), width, plane, workers);
}

void validate_pass_args(const ScalarGrid& dist, const ScalarGrid& image, int workers) {
    if (!image.same_shape(dist) || !image.same_spacing(dist)) {
        throw std::invalid_argument("directional_pass: image/distance shape or spacing mismatch");
    }
    if (workers < 1) {
        throw std::invalid_argument("workers must be >= 1, got " + std::to_string(workers));
    }
}

}  // namespace

const char* engine_name(Engine engine) {
    switch (engine) {
        case Engine::Serial: return "serial";
        case Engine::Parallel: return "parallel";
        case Engine::Oracle: return "oracle";
    }
    return "unknown";
}

namespace detail {

void directional_pass_inplace(ScalarGrid& dist, const ScalarGrid& image,
                              PassDirection direction, const TransformParams& params,
                              int workers) {
    validate_pass_args(dist, image, workers);
    params.validate();
    if (!direction_valid(direction, image.ndim())) {
        throw std::invalid_argument(std::string("invalid pass direction for rank ") +
                                    std::to_string(image.ndim()));
    }
    const PassGeom g = make_geom(image, direction);
    if (g.n_sweep < 2) {
        return;  // nothing beyond the first row/plane
    }
    if (image.ndim() == 3 && direction.axis == 2) {
        const int orientations[1] = {direction.orientation};
        run_x3d_passes(dist, image, orientations, params, workers);
        return;
    }
    const auto offsets = make_pass_offsets(image, direction, params.lambda);
    dispatch_pass(dist.data(), image.data(), g, offsets, params.lambda, workers);
}

void parallel_scan_inplace(const ScalarGrid& image, ScalarGrid& dist,
                           const TransformParams& params, int workers) {
    validate_pass_args(dist, image, workers);
    params.validate();
    const auto directions = pass_sequence(image.ndim());
    for (int it = 0; it < params.iterations; ++it) {
        for (std::size_t i = 0; i < directions.size(); ++i) {
            const PassDirection direction = directions[i];
            // The two width-axis 3D passes are adjacent in the sequence; run
            // them as one transposed pair to pay for the layout change once.
            if (image.ndim() == 3 && direction.axis == 2 && image.width() >= 2) {
                const int orientations[2] = {direction.orientation,
                                             directions[i + 1].orientation};
                run_x3d_passes(dist, image, orientations, params, workers);
                ++i;
                continue;
            }
            directional_pass_inplace(dist, image, direction, params, workers);
        }
    }
}

}  // namespace detail

ScalarGrid directional_pass(ScalarGrid dist, const ScalarGrid& image,
                            PassDirection direction, const TransformParams& params,
                            int workers) {
    detail::directional_pass_inplace(dist, image, direction, params, workers);
    return dist;
}

ScalarGrid parallel_scan(const ScalarGrid& image, ScalarGrid dist,
                         const TransformParams& params, int workers) {
    detail::parallel_scan_inplace(image, dist, params, workers);
    return dist;
}

FixpointResult scan_to_fixpoint(const ScalarGrid& image, ScalarGrid dist,
                                const TransformParams& params, Engine engine,
                                int max_rounds, double tol, int workers) {
    if (engine != Engine::Serial && engine != Engine::Parallel) {
        throw std::invalid_argument("scan_to_fixpoint: engine must be serial or parallel");
    }
    if (max_rounds < 1) {
        throw std::invalid_argument("max_rounds must be >= 1, got " + std::to_string(max_rounds));
    }
    if (tol < 0.0) {
        throw std::invalid_argument("tol must be >= 0");
    }
    params.validate();

    TransformParams round_params = params;
    round_params.iterations = 1;

    FixpointResult result{std::move(dist), 0, false, 0.0};
    std::vector<float> before(result.dist.size());
    while (result.rounds_used < max_rounds) {
        std::memcpy(before.data(), result.dist.data(), before.size() * sizeof(float));
        if (engine == Engine::Serial) {
            detail::serial_scan_inplace(image, result.dist, round_params);
        } else {
            detail::parallel_scan_inplace(image, result.dist, round_params, workers);
        }
        ++result.rounds_used;
        double change = 0.0;
        const float* after = result.dist.data();
        for (std::size_t i = 0; i < before.size(); ++i) {
            change = std::max(change,
                              static_cast<double>(before[i]) - static_cast<double>(after[i]));
        }
        result.last_change = change;
        if (change <= tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace geodist
