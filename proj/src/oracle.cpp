#include "geodist/oracle.hpp"

#include <algorithm>
#include <queue>
#include <utility>
#include <vector>

#include "geodist/metric.hpp"
#include "scan_common.hpp"

namespace geodist {

ScalarGrid dijkstra_exact(const ScalarGrid& image, const ScalarGrid& init_dist,
                          double lambda) {
    if (!image.same_shape(init_dist) || !image.same_spacing(init_dist)) {
        throw std::invalid_argument("dijkstra_exact: image/init shape or spacing mismatch");
    }
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw std::invalid_argument("lambda must lie in [0, 1]");
    }

    const int depth = image.depth();
    const int height = image.height();
    const int width = image.width();
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(height) * width;
    const std::ptrdiff_t sy = width;

    // Full neighborhood = forward ∪ backward causal halves.
    auto offsets_n = serial_neighbor_offsets(image.ndim(), ScanPhase::Forward, image.spacings());
    const auto bwd = serial_neighbor_offsets(image.ndim(), ScanPhase::Backward, image.spacings());
    offsets_n.insert(offsets_n.end(), bwd.begin(), bwd.end());
    const auto offsets = detail::resolve_offsets(offsets_n, sz, sy, lambda);

    const std::size_t n = image.size();
    std::vector<double> label(n);
    using HeapItem = std::pair<double, std::size_t>;
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;

    const float* init = init_dist.data();
    std::size_t n_sources = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::min(static_cast<double>(init[i]),
                                  static_cast<double>(kInfSentinel));
        label[i] = d;
        if (d < kInfSentinel) {
            heap.emplace(d, i);
            ++n_sources;
        }
    }
    if (n_sources == 0) {
        throw NoSourceError("dijkstra_exact: no source cell below the sentinel");
    }

    const float* img = image.data();
    while (!heap.empty()) {
        const auto [d, p] = heap.top();
        heap.pop();
        if (d > label[p]) {
            continue;  // stale entry
        }
        const std::ptrdiff_t sp = static_cast<std::ptrdiff_t>(p);
        const int x = static_cast<int>(sp % width);
        const int y = static_cast<int>((sp / width) % height);
        const int z = static_cast<int>(sp / sz);
        for (const auto& o : offsets) {
            if (static_cast<unsigned>(z + o.dz) >= static_cast<unsigned>(depth) ||
                static_cast<unsigned>(y + o.dy) >= static_cast<unsigned>(height) ||
                static_cast<unsigned>(x + o.dx) >= static_cast<unsigned>(width)) {
                continue;
            }
            const std::size_t q = static_cast<std::size_t>(sp + o.flat);
            const double di = static_cast<double>(img[p]) - static_cast<double>(img[q]);
            const double cand = d + std::sqrt((1.0 - lambda) * o.rho * o.rho + lambda * di * di);
            if (cand < label[q]) {
                label[q] = cand;
                heap.emplace(cand, q);
            }
        }
    }

    ScalarGrid out = grid_like(init_dist, 0.0f);
    float* data = out.data();
    for (std::size_t i = 0; i < n; ++i) {
        data[i] = static_cast<float>(label[i]);
    }
    return out;
}

}  // namespace geodist
