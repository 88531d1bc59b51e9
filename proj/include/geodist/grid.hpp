#ifndef GEODIST_GRID_HPP
#define GEODIST_GRID_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace geodist {

// Unvisited marker for distance grids. Finite so that relaxation sums stay
// ordered, and representable exactly in single precision.
inline constexpr float kInfSentinel = 1.0e10f;

// Dense scalar field over a 2D or 3D lattice. Axis order is
// (depth,) height, width with width fastest; a 2D grid uses the same layout
// with depth == 1. Storage is single precision, spacing is kept in double
// for the relaxation arithmetic.
class ScalarGrid {
public:
    ScalarGrid(int ndim, std::span<const int> dims,
               std::span<const double> spacing, float fill);

    int ndim() const { return ndim_; }

    // Logical axis accessors, axis in [0, ndim).
    int extent(int axis) const { return dims_[axis + offset_]; }
    double spacing(int axis) const { return spacing_[axis + offset_]; }

    // Canonical accessors; depth()/spacing_depth() are 1 for 2D grids.
    int depth() const { return dims_[0]; }
    int height() const { return dims_[1]; }
    int width() const { return dims_[2]; }
    double spacing_depth() const { return spacing_[0]; }
    double spacing_height() const { return spacing_[1]; }
    double spacing_width() const { return spacing_[2]; }

    std::size_t size() const { return data_.size(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    std::span<float> values() { return data_; }
    std::span<const float> values() const { return data_; }

    std::size_t index(int z, int y, int x) const {
        return (static_cast<std::size_t>(z) * dims_[1] + y) * dims_[2] + x;
    }
    float& at(int z, int y, int x) { return data_[index(z, y, x)]; }
    float at(int z, int y, int x) const { return data_[index(z, y, x)]; }
    float& at(int y, int x) { return data_[index(0, y, x)]; }
    float at(int y, int x) const { return data_[index(0, y, x)]; }

    bool same_shape(const ScalarGrid& other) const {
        return ndim_ == other.ndim_ && dims_ == other.dims_;
    }
    bool same_spacing(const ScalarGrid& other) const {
        return spacing_ == other.spacing_;
    }

    // Logical dims/spacing, length ndim, in (depth,) height, width order.
    std::span<const int> dims() const {
        return std::span<const int>(dims_.data() + offset_, static_cast<std::size_t>(ndim_));
    }
    std::span<const double> spacings() const {
        return std::span<const double>(spacing_.data() + offset_, static_cast<std::size_t>(ndim_));
    }

private:
    int ndim_ = 2;
    int offset_ = 1;  // 3 - ndim; index of the first logical axis
    std::array<int, 3> dims_{1, 1, 1};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    std::vector<float> data_;
};

// Same shape and spacing, and max elementwise |a - b| <= tol. Cells holding
// kInfSentinel compare equal only to kInfSentinel, regardless of tol.
bool grids_approx_equal(const ScalarGrid& a, const ScalarGrid& b, double tol);

// Returns a grid with the same shape/spacing as `like`, filled with `fill`.
ScalarGrid grid_like(const ScalarGrid& like, float fill);

// Parameters shared by every transform.
struct TransformParams {
    double lambda = 1.0;   // 0 = pure Euclidean, 1 = pure geodesic-on-intensity
    double nu = 1.0e10;    // soft-mask scaling, distance units
    int iterations = 2;    // full scan rounds

    // Throws std::invalid_argument when out of range.
    void validate() const;
};

}  // namespace geodist

#endif
