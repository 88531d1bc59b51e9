#ifndef GEODIST_IO_HPP
#define GEODIST_IO_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "geodist/grid.hpp"

namespace geodist {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parse/validation failure in a grid or PGM stream; carries the byte offset
// of the offending field.
class FormatError : public std::runtime_error {
public:
    enum class Code {
        BadMagic,
        BadRank,
        BadDims,
        InvalidSpacing,
        TruncatedPayload,
        UnsupportedFormat,
        MalformedHeader,
    };

    FormatError(Code code, std::size_t offset, const std::string& message)
        : std::runtime_error(message), code_(code), offset_(offset) {}

    Code code() const { return code_; }
    std::size_t offset() const { return offset_; }

private:
    Code code_;
    std::size_t offset_;
};

// FGD1 grid container, little-endian throughout:
//   bytes 0..3   magic "FGD1"
//   u32          ndim (2 or 3)
//   u32 * ndim   extents, (depth,) height, width order
//   f32 * ndim   spacing, same order
//   f32 * N      row-major data, width fastest
// Returns the byte count written: 8 + 8*ndim + 4*N.
std::size_t write_grid_fgd1(const ScalarGrid& grid, std::ostream& sink);

// Inverse of write_grid_fgd1. Validates magic, rank, extents, spacing and the
// exact payload length; throws FormatError with the failing byte offset.
ScalarGrid read_grid_fgd1(std::istream& source);

// Binary PGM ("P5") reader: intensities normalized to [0,1] by maxval,
// spacing (1,1); header comments tolerated; maxval > 255 means 2-byte
// big-endian samples.
ScalarGrid read_pgm(std::istream& source);

// Writes a 2D distance grid as a P5 preview: finite values min-max scaled to
// 0..255 (round half up), kInfSentinel cells 255, constant grids 0.
std::size_t write_pgm_preview(const ScalarGrid& grid, std::ostream& sink);

// File helpers used by the CLI. read_grid_file sniffs FGD1 vs PGM from the
// leading magic bytes.
ScalarGrid read_grid_file(const std::string& path);
void write_fgd1_file(const ScalarGrid& grid, const std::string& path);
void write_preview_file(const ScalarGrid& grid, const std::string& path);

}  // namespace geodist

#endif
