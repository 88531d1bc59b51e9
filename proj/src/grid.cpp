#include "geodist/grid.hpp"

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>

namespace geodist {

ScalarGrid::ScalarGrid(int ndim, std::span<const int> dims,
                       std::span<const double> spacing, float fill) {
    if (ndim != 2 && ndim != 3) {
        throw std::invalid_argument("grid rank must be 2 or 3, got " + std::to_string(ndim));
    }
    if (dims.size() != static_cast<std::size_t>(ndim) ||
        spacing.size() != static_cast<std::size_t>(ndim)) {
        std::ostringstream msg;
        msg << "expected " << ndim << " dims and spacings, got " << dims.size()
            << " and " << spacing.size();
        throw std::invalid_argument(msg.str());
    }
    ndim_ = ndim;
    offset_ = 3 - ndim;
    std::size_t total = 1;
    for (int axis = 0; axis < ndim; ++axis) {
        if (dims[axis] < 1) {
            throw std::invalid_argument("grid extent must be >= 1, got " +
                                        std::to_string(dims[axis]));
        }
        if (!(spacing[axis] > 0.0) || !std::isfinite(spacing[axis])) {
            throw std::invalid_argument("grid spacing must be finite and > 0, got " +
                                        std::to_string(spacing[axis]));
        }
        dims_[axis + offset_] = dims[axis];
        spacing_[axis + offset_] = spacing[axis];
        total *= static_cast<std::size_t>(dims[axis]);
    }
    data_.assign(total, fill);
}

bool grids_approx_equal(const ScalarGrid& a, const ScalarGrid& b, double tol) {
    if (tol < 0.0) {
        throw std::invalid_argument("tolerance must be >= 0");
    }
    if (!a.same_shape(b) || !a.same_spacing(b)) {
        return false;
    }
    const float* pa = a.data();
    const float* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool inf_a = pa[i] >= kInfSentinel;
        const bool inf_b = pb[i] >= kInfSentinel;
        if (inf_a != inf_b) {
            return false;
        }
        if (!inf_a && std::abs(static_cast<double>(pa[i]) - static_cast<double>(pb[i])) > tol) {
            return false;
        }
    }
    return true;
}

ScalarGrid grid_like(const ScalarGrid& like, float fill) {
    return ScalarGrid(like.ndim(), like.dims(), like.spacings(), fill);
}

void TransformParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
    if (!(nu >= 0.0)) {
        throw std::invalid_argument("nu must be >= 0, got " + std::to_string(nu));
    }
    if (iterations < 1) {
        throw std::invalid_argument("iterations must be >= 1, got " +
                                    std::to_string(iterations));
    }
}

}  // namespace geodist
