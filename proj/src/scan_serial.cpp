#include "geodist/scan_serial.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "geodist/metric.hpp"
#include "scan_common.hpp"

namespace geodist {

namespace {

using detail::CostKind;
using detail::RelaxOffset;

template <CostKind K>
void sweep(float* dist, const float* img, int depth, int height, int width,
           std::span<const RelaxOffset> offsets, bool forward, double lambda) {
    // Offsets valid for the current (z, y); at most 13 of them.
    std::array<RelaxOffset, 13> row_offsets;
    for (int iz = 0; iz < depth; ++iz) {
        const int z = forward ? iz : depth - 1 - iz;
        for (int iy = 0; iy < height; ++iy) {
            const int y = forward ? iy : height - 1 - iy;
            int n_row = 0;
            for (const RelaxOffset& o : offsets) {
                const int zz = z + o.dz;
                const int yy = y + o.dy;
                if (zz >= 0 && zz < depth && yy >= 0 && yy < height) {
                    row_offsets[n_row++] = o;
                }
            }
            float* drow = dist + (static_cast<std::ptrdiff_t>(z) * height + y) * width;
            const float* irow = img + (static_cast<std::ptrdiff_t>(z) * height + y) * width;
            for (int ix = 0; ix < width; ++ix) {
                const int x = forward ? ix : width - 1 - ix;
                double best = drow[x];
                const double ip = (K == CostKind::Spatial) ? 0.0 : irow[x];
                for (int k = 0; k < n_row; ++k) {
                    const RelaxOffset& o = row_offsets[k];
                    if (static_cast<unsigned>(x + o.dx) >= static_cast<unsigned>(width)) {
                        continue;
                    }
                    const std::ptrdiff_t q = x + o.flat;
                    const double di =
                        (K == CostKind::Spatial) ? 0.0 : ip - static_cast<double>(irow[q]);
                    const double cand =
                        static_cast<double>(drow[q]) + detail::relax_cost<K>(di, o.rho, o.c0, lambda);
                    best = std::min(best, cand);
                }
                drow[x] = static_cast<float>(best);
            }
        }
    }
}

template <CostKind K>
void run_iterations(float* dist, const float* img, int depth, int height, int width,
                    std::span<const RelaxOffset> fwd, std::span<const RelaxOffset> bwd,
                    int iterations, double lambda) {
    for (int it = 0; it < iterations; ++it) {
        sweep<K>(dist, img, depth, height, width, fwd, true, lambda);
        sweep<K>(dist, img, depth, height, width, bwd, false, lambda);
    }
}

}  // namespace

namespace detail {

void serial_scan_inplace(const ScalarGrid& image, ScalarGrid& dist,
                         const TransformParams& params) {
    if (!image.same_shape(dist) || !image.same_spacing(dist)) {
        throw std::invalid_argument("serial_scan: image/distance shape or spacing mismatch");
    }
    params.validate();

    const int depth = image.depth();
    const int height = image.height();
    const int width = image.width();
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(height) * width;
    const std::ptrdiff_t sy = width;

    const auto fwd_n = serial_neighbor_offsets(image.ndim(), ScanPhase::Forward, image.spacings());
    const auto bwd_n = serial_neighbor_offsets(image.ndim(), ScanPhase::Backward, image.spacings());
    const auto fwd = resolve_offsets(fwd_n, sz, sy, params.lambda);
    const auto bwd = resolve_offsets(bwd_n, sz, sy, params.lambda);

    switch (classify_cost(params.lambda)) {
        case CostKind::Spatial:
            run_iterations<CostKind::Spatial>(dist.data(), image.data(), depth, height, width,
                                              fwd, bwd, params.iterations, params.lambda);
            break;
        case CostKind::Intensity:
            run_iterations<CostKind::Intensity>(dist.data(), image.data(), depth, height, width,
                                                fwd, bwd, params.iterations, params.lambda);
            break;
        case CostKind::Blend:
            run_iterations<CostKind::Blend>(dist.data(), image.data(), depth, height, width,
                                            fwd, bwd, params.iterations, params.lambda);
            break;
    }
}

}  // namespace detail

ScalarGrid serial_scan(const ScalarGrid& image, ScalarGrid dist,
                       const TransformParams& params) {
    detail::serial_scan_inplace(image, dist, params);
    return dist;
}

}  // namespace geodist
