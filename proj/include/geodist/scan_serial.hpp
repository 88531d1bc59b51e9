#ifndef GEODIST_SCAN_SERIAL_HPP
#define GEODIST_SCAN_SERIAL_HPP

#include "geodist/grid.hpp"

namespace geodist {

// Single-threaded two-phase raster scan over the full causal half
// neighborhood: each iteration runs one forward pass in lexicographic order
// and one backward pass in reverse order with the mirrored stencil. This is
// the non-parallelisable baseline engine.
ScalarGrid serial_scan(const ScalarGrid& image, ScalarGrid dist,
                       const TransformParams& params);

namespace detail {
void serial_scan_inplace(const ScalarGrid& image, ScalarGrid& dist,
                         const TransformParams& params);
}

}  // namespace geodist

#endif
