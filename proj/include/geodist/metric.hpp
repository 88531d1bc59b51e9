#ifndef GEODIST_METRIC_HPP
#define GEODIST_METRIC_HPP

#include <cmath>
#include <span>
#include <vector>

namespace geodist {

// Lattice offset in canonical (dz, dy, dx) order with its precomputed spatial
// length rho = sqrt(sum (delta_i * spacing_i)^2). dz is always 0 for 2D.
struct NeighborOffset {
    int dz = 0;
    int dy = 0;
    int dx = 0;
    double rho = 0.0;

    bool operator==(const NeighborOffset&) const = default;
};

// One sweep direction: the axis walked sequentially (canonical index:
// 0 = depth, 1 = height, 2 = width) and the walk orientation.
struct PassDirection {
    int axis = 1;
    int orientation = +1;

    bool operator==(const PassDirection&) const = default;
};

namespace pass {
inline constexpr PassDirection front_back{0, +1};
inline constexpr PassDirection back_front{0, -1};
inline constexpr PassDirection top_bottom{1, +1};
inline constexpr PassDirection bottom_top{1, -1};
inline constexpr PassDirection left_right{2, +1};
inline constexpr PassDirection right_left{2, -1};
}  // namespace pass

// Sweep directions of one full round, in execution order: top-bottom,
// bottom-top, left-right, right-left, with front-back and back-front
// prepended for 3D.
std::vector<PassDirection> pass_sequence(int ndim);

bool direction_valid(PassDirection direction, int ndim);

const char* direction_name(PassDirection direction);

// Local step cost between two lattice sites:
//   sqrt((1 - lambda) * rho^2 + lambda * (ip - iq)^2)
// lambda = 0 is the pure spatial (Euclidean) cost, lambda = 1 the pure
// intensity (geodesic) cost. Symmetric in ip, iq.
double step_cost(double intensity_p, double intensity_q,
                 const NeighborOffset& offset, double lambda);

// Offsets read by one directional pass: they point from the current element
// into the previous row (2D, 3 offsets) or plane (3D, 9 offsets) of the
// sweep. `spacing` is logical, length ndim.
std::vector<NeighborOffset> pass_neighbor_offsets(PassDirection direction, int ndim,
                                                  std::span<const double> spacing);

enum class ScanPhase { Forward, Backward };

// Causal half-neighborhood of the serial two-phase scan. Forward: 4 offsets
// in 2D (upper-left, up, upper-right, left), 13 in 3D (the 3x3 window of the
// previous plane plus the 4 causal in-plane offsets). Backward is the
// forward set negated componentwise.
std::vector<NeighborOffset> serial_neighbor_offsets(int ndim, ScanPhase phase,
                                                    std::span<const double> spacing);

}  // namespace geodist

#endif
