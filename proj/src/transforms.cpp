#include "geodist/transforms.hpp"

#include <algorithm>
#include <stdexcept>

#include "geodist/oracle.hpp"
#include "geodist/scan_serial.hpp"

namespace geodist {

namespace {

void require_match(const ScalarGrid& a, const ScalarGrid& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }
    if (!a.same_spacing(b)) {
        throw std::invalid_argument(std::string(what) + ": spacing mismatch");
    }
}

void require_mask_range(const ScalarGrid& mask, const char* what) {
    for (float v : mask.values()) {
        if (!(v >= 0.0f && v <= 1.0f)) {
            throw std::invalid_argument(std::string(what) + ": mask values must lie in [0, 1]");
        }
    }
}

ScalarGrid threshold_mask(const ScalarGrid& mask) {
    ScalarGrid out = grid_like(mask, 0.0f);
    float* o = out.data();
    const float* m = mask.data();
    for (std::size_t i = 0; i < mask.size(); ++i) {
        o[i] = m[i] >= 0.5f ? 1.0f : 0.0f;
    }
    return out;
}

ScalarGrid complement_mask(const ScalarGrid& binary) {
    ScalarGrid out = grid_like(binary, 0.0f);
    float* o = out.data();
    const float* m = binary.data();
    for (std::size_t i = 0; i < binary.size(); ++i) {
        o[i] = m[i] >= 0.5f ? 0.0f : 1.0f;
    }
    return out;
}

std::size_t count_set(const ScalarGrid& binary) {
    std::size_t n = 0;
    for (float v : binary.values()) {
        n += v >= 0.5f ? 1 : 0;
    }
    return n;
}

// Distance from the cells where `sources` is set, soft-bounded by nu.
ScalarGrid distance_from_sources(const ScalarGrid& image, const ScalarGrid& sources,
                                 const TransformParams& params, const ScanPolicy& policy,
                                 TransformStats* stats) {
    return generalized_geodesic(image, complement_mask(sources), params, policy, stats);
}

}  // namespace

void GsfParams::validate() const {
    base.validate();
    if (!(theta >= 0.0)) {
        throw std::invalid_argument("theta must be >= 0, got " + std::to_string(theta));
    }
}

ScalarGrid init_hard_seeds(const ScalarGrid& seed_mask) {
    ScalarGrid dist = grid_like(seed_mask, kInfSentinel);
    float* d = dist.data();
    const float* m = seed_mask.data();
    std::size_t n_seeds = 0;
    for (std::size_t i = 0; i < seed_mask.size(); ++i) {
        if (m[i] >= 0.5f) {
            d[i] = 0.0f;
            ++n_seeds;
        }
    }
    if (n_seeds == 0) {
        throw EmptySeedsError("no seed cell at or above the 0.5 mask threshold");
    }
    return dist;
}

ScalarGrid run_scan(const ScalarGrid& image, ScalarGrid dist, const TransformParams& params,
                    const ScanPolicy& policy, TransformStats* stats) {
    params.validate();
    switch (policy.engine) {
        case Engine::Oracle: {
            ScalarGrid out = dijkstra_exact(image, dist, params.lambda);
            if (stats) {
                stats->rounds += 1;
            }
            return out;
        }
        case Engine::Serial:
        case Engine::Parallel: {
            if (policy.to_fixpoint) {
                FixpointResult r = scan_to_fixpoint(image, std::move(dist), params, policy.engine,
                                                    policy.max_rounds, policy.tol, policy.workers);
                if (stats) {
                    stats->rounds += r.rounds_used;
                    stats->converged = stats->converged && r.converged;
                }
                return std::move(r.dist);
            }
            if (policy.engine == Engine::Serial) {
                detail::serial_scan_inplace(image, dist, params);
            } else {
                detail::parallel_scan_inplace(image, dist, params, policy.workers);
            }
            if (stats) {
                stats->rounds += params.iterations;
            }
            return dist;
        }
    }
    throw std::invalid_argument("unknown engine");
}

ScalarGrid geodesic_distance(const ScalarGrid& image, const ScalarGrid& seed_mask,
                             const TransformParams& params, const ScanPolicy& policy,
                             TransformStats* stats) {
    require_match(image, seed_mask, "geodesic_distance");
    return run_scan(image, init_hard_seeds(seed_mask), params, policy, stats);
}

ScalarGrid euclidean_distance(const ScalarGrid& seed_mask, int iterations,
                              const ScanPolicy& policy, TransformStats* stats) {
    TransformParams params;
    params.lambda = 0.0;
    params.iterations = iterations;
    ScalarGrid uniform = grid_like(seed_mask, 0.0f);
    return run_scan(uniform, init_hard_seeds(seed_mask), params, policy, stats);
}

ScalarGrid generalized_geodesic(const ScalarGrid& image, const ScalarGrid& soft_mask,
                                const TransformParams& params, const ScanPolicy& policy,
                                TransformStats* stats) {
    require_match(image, soft_mask, "generalized_geodesic");
    require_mask_range(soft_mask, "generalized_geodesic");
    params.validate();

    ScalarGrid dist = grid_like(soft_mask, 0.0f);
    float* d = dist.data();
    const float* m = soft_mask.data();
    for (std::size_t i = 0; i < soft_mask.size(); ++i) {
        const double v = params.nu * static_cast<double>(m[i]);
        d[i] = static_cast<float>(std::min(v, static_cast<double>(kInfSentinel)));
    }
    return run_scan(image, std::move(dist), params, policy, stats);
}

ScalarGrid signed_geodesic(const ScalarGrid& image, const ScalarGrid& mask,
                           const TransformParams& params, const ScanPolicy& policy,
                           TransformStats* stats) {
    require_match(image, mask, "signed_geodesic");
    const ScalarGrid inside = threshold_mask(mask);
    const ScalarGrid outside = complement_mask(inside);
    if (count_set(inside) == 0) {
        throw EmptySeedsError("signed_geodesic: mask is empty");
    }
    if (count_set(outside) == 0) {
        throw EmptySeedsError("signed_geodesic: mask complement is empty");
    }
    const ScalarGrid d_in = run_scan(image, init_hard_seeds(inside), params, policy, stats);
    const ScalarGrid d_out = run_scan(image, init_hard_seeds(outside), params, policy, stats);

    ScalarGrid out = grid_like(mask, 0.0f);
    float* o = out.data();
    const float* a = d_in.data();
    const float* b = d_out.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        o[i] = a[i] - b[i];
    }
    return out;
}

ScalarGrid geodesic_dilate(const ScalarGrid& image, const ScalarGrid& mask, double theta,
                           const TransformParams& params, const ScanPolicy& policy,
                           TransformStats* stats) {
    if (!(theta >= 0.0)) {
        throw std::invalid_argument("theta must be >= 0");
    }
    require_match(image, mask, "geodesic_dilate");
    const ScalarGrid sources = threshold_mask(mask);
    const ScalarGrid dist = distance_from_sources(image, sources, params, policy, stats);

    ScalarGrid out = grid_like(mask, 0.0f);
    float* o = out.data();
    const float* d = dist.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        o[i] = static_cast<double>(d[i]) <= theta ? 1.0f : 0.0f;
    }
    return out;
}

ScalarGrid geodesic_erode(const ScalarGrid& image, const ScalarGrid& mask, double theta,
                          const TransformParams& params, const ScanPolicy& policy,
                          TransformStats* stats) {
    if (!(theta >= 0.0)) {
        throw std::invalid_argument("theta must be >= 0");
    }
    require_match(image, mask, "geodesic_erode");
    const ScalarGrid kept = threshold_mask(mask);
    const ScalarGrid sources = complement_mask(kept);
    if (count_set(sources) == 0) {
        // Nothing to erode from.
        if (stats) {
            stats->complement_empty = true;
        }
        return kept;
    }
    const ScalarGrid dist = distance_from_sources(image, sources, params, policy, stats);

    ScalarGrid out = grid_like(mask, 0.0f);
    float* o = out.data();
    const float* d = dist.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        o[i] = static_cast<double>(d[i]) > theta ? 1.0f : 0.0f;
    }
    return out;
}

ScalarGrid gsf(const ScalarGrid& image, const ScalarGrid& soft_mask, const GsfParams& params,
               const ScanPolicy& policy, TransformStats* stats) {
    params.validate();
    require_match(image, soft_mask, "gsf");
    const ScalarGrid dilated =
        geodesic_dilate(image, soft_mask, params.theta, params.base, policy, stats);
    return geodesic_erode(image, dilated, params.theta, params.base, policy, stats);
}

}  // namespace geodist
