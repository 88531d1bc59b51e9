#include "geodist/metric.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace geodist {

namespace {

// Canonical (dz, dy, dx) spacing, padding 2D with a unit depth step.
std::array<double, 3> canonical_spacing(int ndim, std::span<const double> spacing) {
    if (ndim != 2 && ndim != 3) {
        throw std::invalid_argument("rank must be 2 or 3, got " + std::to_string(ndim));
    }
    if (spacing.size() != static_cast<std::size_t>(ndim)) {
        throw std::invalid_argument("spacing length does not match rank");
    }
    std::array<double, 3> s{1.0, 1.0, 1.0};
    for (int axis = 0; axis < ndim; ++axis) {
        s[axis + (3 - ndim)] = spacing[axis];
    }
    return s;
}

NeighborOffset make_offset(int dz, int dy, int dx, const std::array<double, 3>& spacing) {
    const double lz = dz * spacing[0];
    const double ly = dy * spacing[1];
    const double lx = dx * spacing[2];
    return NeighborOffset{dz, dy, dx, std::sqrt(lz * lz + ly * ly + lx * lx)};
}

}  // namespace

std::vector<PassDirection> pass_sequence(int ndim) {
    if (ndim == 2) {
        return {pass::top_bottom, pass::bottom_top, pass::left_right, pass::right_left};
    }
    if (ndim == 3) {
        return {pass::front_back, pass::back_front, pass::top_bottom,
                pass::bottom_top, pass::left_right, pass::right_left};
    }
    throw std::invalid_argument("rank must be 2 or 3, got " + std::to_string(ndim));
}

bool direction_valid(PassDirection direction, int ndim) {
    if (direction.orientation != +1 && direction.orientation != -1) {
        return false;
    }
    if (ndim == 2) {
        return direction.axis == 1 || direction.axis == 2;
    }
    if (ndim == 3) {
        return direction.axis >= 0 && direction.axis <= 2;
    }
    return false;
}

const char* direction_name(PassDirection direction) {
    if (direction == pass::front_back) return "front-back";
    if (direction == pass::back_front) return "back-front";
    if (direction == pass::top_bottom) return "top-bottom";
    if (direction == pass::bottom_top) return "bottom-top";
    if (direction == pass::left_right) return "left-right";
    if (direction == pass::right_left) return "right-left";
    return "invalid";
}

double step_cost(double intensity_p, double intensity_q,
                 const NeighborOffset& offset, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1], got " + std::to_string(lambda));
    }
    const double di = intensity_p - intensity_q;
    return std::sqrt((1.0 - lambda) * offset.rho * offset.rho + lambda * di * di);
}

std::vector<NeighborOffset> pass_neighbor_offsets(PassDirection direction, int ndim,
                                                  std::span<const double> spacing) {
    if (!direction_valid(direction, ndim)) {
        throw std::invalid_argument(std::string("invalid pass direction for rank ") +
                                    std::to_string(ndim));
    }
    const auto s = canonical_spacing(ndim, spacing);
    // The component along the sweep axis steps back into the previous
    // row/plane; the other axes are free over {-1, 0, +1}.
    std::vector<NeighborOffset> offsets;
    offsets.reserve(ndim == 2 ? 3 : 9);
    std::array<int, 3> delta{0, 0, 0};
    delta[direction.axis] = -direction.orientation;

    std::array<int, 2> free_axes{};
    int n_free = 0;
    for (int axis = 0; axis < 3; ++axis) {
        if (axis != direction.axis && !(ndim == 2 && axis == 0)) {
            free_axes[n_free++] = axis;
        }
    }
    if (ndim == 2) {
        for (int a = -1; a <= 1; ++a) {
            delta[free_axes[0]] = a;
            offsets.push_back(make_offset(delta[0], delta[1], delta[2], s));
        }
    } else {
        for (int a = -1; a <= 1; ++a) {
            for (int b = -1; b <= 1; ++b) {
                delta[free_axes[0]] = a;
                delta[free_axes[1]] = b;
                offsets.push_back(make_offset(delta[0], delta[1], delta[2], s));
            }
        }
    }
    return offsets;
}

std::vector<NeighborOffset> serial_neighbor_offsets(int ndim, ScanPhase phase,
                                                    std::span<const double> spacing) {
    const auto s = canonical_spacing(ndim, spacing);
    // Forward = the half of the 8-/26-neighborhood that precedes the current
    // element in lexicographic (z, y, x) order.
    std::vector<NeighborOffset> offsets;
    offsets.reserve(ndim == 2 ? 4 : 13);
    const int zlo = (ndim == 3) ? -1 : 0;
    for (int dz = zlo; dz <= 1; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const bool causal = dz < 0 || (dz == 0 && (dy < 0 || (dy == 0 && dx < 0)));
                if (!causal) {
                    continue;
                }
                if (phase == ScanPhase::Forward) {
                    offsets.push_back(make_offset(dz, dy, dx, s));
                } else {
                    offsets.push_back(make_offset(-dz, -dy, -dx, s));
                }
            }
        }
    }
    return offsets;
}

}  // namespace geodist
