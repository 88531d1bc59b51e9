#ifndef GEODIST_TRANSFORMS_HPP
#define GEODIST_TRANSFORMS_HPP

#include <stdexcept>

#include "geodist/grid.hpp"
#include "geodist/scan_parallel.hpp"

namespace geodist {

class EmptySeedsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GsfParams {
    TransformParams base;
    double theta = 0.0;  // margin threshold, distance units

    void validate() const;
};

// How the scan engine is driven by a transform.
struct ScanPolicy {
    Engine engine = Engine::Parallel;
    int workers = 1;
    bool to_fixpoint = false;       // iterate 1-round scans until converged
    int max_rounds = 100;
    double tol = kDefaultFixpointTol;
};

// Filled in by transforms when the caller wants run metadata.
struct TransformStats {
    int rounds = 0;               // engine rounds executed, summed over scans
    bool converged = true;        // false if any fixpoint run hit max_rounds
    bool complement_empty = false;  // set by geodesic_erode / gsf
};

// 0 where mask >= 0.5, kInfSentinel elsewhere. Throws EmptySeedsError when no
// element reaches the threshold.
ScalarGrid init_hard_seeds(const ScalarGrid& seed_mask);

// Runs the chosen engine on an already-initialized distance grid. This is
// the common driver behind every transform; exposed so callers can seed
// distance grids themselves.
ScalarGrid run_scan(const ScalarGrid& image, ScalarGrid dist, const TransformParams& params,
                    const ScanPolicy& policy, TransformStats* stats = nullptr);

// Hard-seeded distance transform; lambda = 1 is the pure geodesic transform,
// lambda = 0 the pure Euclidean (chamfer) one.
ScalarGrid geodesic_distance(const ScalarGrid& image, const ScalarGrid& seed_mask,
                             const TransformParams& params, const ScanPolicy& policy,
                             TransformStats* stats = nullptr);

// geodesic_distance with lambda = 0 on a dummy uniform image; independent of
// any image content by construction.
ScalarGrid euclidean_distance(const ScalarGrid& seed_mask, int iterations,
                              const ScanPolicy& policy, TransformStats* stats = nullptr);

// Soft-seeded distance: D(x) = min over y of (nu * M(y) + d_geo(x, y)),
// realized by initializing the distance grid to nu * M and relaxing.
ScalarGrid generalized_geodesic(const ScalarGrid& image, const ScalarGrid& soft_mask,
                                const TransformParams& params, const ScanPolicy& policy,
                                TransformStats* stats = nullptr);

// S(x) = D(x; seeds = mask) - D(x; seeds = complement): negative strictly
// inside the mask, positive strictly outside.
ScalarGrid signed_geodesic(const ScalarGrid& image, const ScalarGrid& mask,
                           const TransformParams& params, const ScanPolicy& policy,
                           TransformStats* stats = nullptr);

// Binary mask of cells within generalized distance theta of the mask.
ScalarGrid geodesic_dilate(const ScalarGrid& image, const ScalarGrid& mask, double theta,
                           const TransformParams& params, const ScanPolicy& policy,
                           TransformStats* stats = nullptr);

// Binary mask of cells farther than theta from the mask complement. An empty
// complement yields all ones and is flagged via TransformStats.
ScalarGrid geodesic_erode(const ScalarGrid& image, const ScalarGrid& mask, double theta,
                          const TransformParams& params, const ScanPolicy& policy,
                          TransformStats* stats = nullptr);

// Geodesic Symmetric Filtering: geodesic closing (erode of dilate) of the
// 0.5-thresholded mask at margin theta.
ScalarGrid gsf(const ScalarGrid& image, const ScalarGrid& soft_mask, const GsfParams& params,
               const ScanPolicy& policy, TransformStats* stats = nullptr);

}  // namespace geodist

#endif
