#ifndef GEODIST_ORACLE_HPP
#define GEODIST_ORACLE_HPP

#include <stdexcept>

#include "geodist/grid.hpp"

namespace geodist {

class NoSourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Exact multi-source shortest-path distances on the full 8-/26-connected
// grid graph with step_cost edge weights, seeded by every cell of init_dist
// that is below kInfSentinel. Label-setting with a binary heap; labels are
// kept in double precision and cast to storage precision on output.
ScalarGrid dijkstra_exact(const ScalarGrid& image, const ScalarGrid& init_dist,
                          double lambda);

}  // namespace geodist

#endif
