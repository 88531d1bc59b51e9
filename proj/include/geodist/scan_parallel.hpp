#ifndef GEODIST_SCAN_PARALLEL_HPP
#define GEODIST_SCAN_PARALLEL_HPP

#include "geodist/grid.hpp"
#include "geodist/metric.hpp"

namespace geodist {

enum class Engine { Serial, Parallel, Oracle };

const char* engine_name(Engine engine);

// Default convergence tolerance for single-precision storage.
inline constexpr double kDefaultFixpointTol = 1e-6;

// One directional pass: sweeps the direction's axis from the second
// row/plane to the last; every element of the swept row/plane is relaxed
// independently from the previous row/plane, so the per-row/plane update is
// data parallel. Output is identical for every workers count.
ScalarGrid directional_pass(ScalarGrid dist, const ScalarGrid& image,
                            PassDirection direction, const TransformParams& params,
                            int workers);

// One round = all 4 (2D) or 6 (3D) directional passes in the fixed order
// front-back, back-front (3D only), top-bottom, bottom-top, left-right,
// right-left; repeated params.iterations times.
ScalarGrid parallel_scan(const ScalarGrid& image, ScalarGrid dist,
                         const TransformParams& params, int workers);

struct FixpointResult {
    ScalarGrid dist;
    int rounds_used = 0;
    bool converged = false;
    double last_change = 0.0;
};

// Repeats 1-iteration rounds of the chosen engine until the largest
// elementwise change of a round is <= tol, or max_rounds is hit (reported
// through FixpointResult::converged, never silently).
FixpointResult scan_to_fixpoint(const ScalarGrid& image, ScalarGrid dist,
                                const TransformParams& params, Engine engine,
                                int max_rounds, double tol = kDefaultFixpointTol,
                                int workers = 1);

namespace detail {
void directional_pass_inplace(ScalarGrid& dist, const ScalarGrid& image,
                              PassDirection direction, const TransformParams& params,
                              int workers);
void parallel_scan_inplace(const ScalarGrid& image, ScalarGrid& dist,
                           const TransformParams& params, int workers);
}

}  // namespace geodist

#endif
