#ifndef GEODIST_SCAN_COMMON_HPP
#define GEODIST_SCAN_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "geodist/metric.hpp"

namespace geodist::detail {

// Cost specialization hoisted out of the relaxation loops. Both engines
// dispatch on the exact lambda value, so they always agree on the code path.
enum class CostKind { Spatial, Intensity, Blend };

inline CostKind classify_cost(double lambda) {
    if (lambda == 0.0) return CostKind::Spatial;
    if (lambda == 1.0) return CostKind::Intensity;
    return CostKind::Blend;
}

// NeighborOffset resolved against the grid strides, with the blend constant
// (1 - lambda) * rho^2 precomputed.
struct RelaxOffset {
    std::ptrdiff_t flat = 0;
    int dz = 0;
    int dy = 0;
    int dx = 0;
    double rho = 0.0;
    double c0 = 0.0;
};

inline std::vector<RelaxOffset> resolve_offsets(std::span<const NeighborOffset> offsets,
                                                std::ptrdiff_t stride_z,
                                                std::ptrdiff_t stride_y, double lambda) {
    std::vector<RelaxOffset> resolved;
    resolved.reserve(offsets.size());
    for (const NeighborOffset& o : offsets) {
        RelaxOffset r;
        r.flat = o.dz * stride_z + o.dy * stride_y + o.dx;
        r.dz = o.dz;
        r.dy = o.dy;
        r.dx = o.dx;
        r.rho = o.rho;
        r.c0 = (1.0 - lambda) * o.rho * o.rho;
        resolved.push_back(r);
    }
    return resolved;
}

template <CostKind K>
inline double relax_cost(double intensity_diff, double rho, double c0, double lambda) {
    if constexpr (K == CostKind::Spatial) {
        (void)intensity_diff;
        (void)c0;
        (void)lambda;
        return rho;
    } else if constexpr (K == CostKind::Intensity) {
        (void)rho;
        (void)c0;
        (void)lambda;
        return std::abs(intensity_diff);
    } else {
        (void)rho;
        return std::sqrt(c0 + lambda * intensity_diff * intensity_diff);
    }
}

}  // namespace geodist::detail

#endif
