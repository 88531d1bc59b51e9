#include "geodist/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace geodist {

namespace {

constexpr std::array<unsigned char, 4> kMagic{0x46, 0x47, 0x44, 0x31};  // "FGD1"

void append_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
    buf.push_back(static_cast<unsigned char>(v & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    buf.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void append_f32(std::vector<unsigned char>& buf, float v) {
    append_u32(buf, std::bit_cast<std::uint32_t>(v));
}

// Reads exactly n bytes; returns the number actually read.
std::size_t read_bytes(std::istream& is, unsigned char* out, std::size_t n) {
    is.read(reinterpret_cast<char*>(out), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(is.gcount());
}

std::uint32_t load_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float load_f32(const unsigned char* p) { return std::bit_cast<float>(load_u32(p)); }

[[noreturn]] void truncated(std::size_t offset, std::size_t expected, std::size_t actual,
                            const char* what) {
    std::ostringstream msg;
    msg << "truncated " << what << " at byte " << offset << ": expected " << expected
        << " bytes, got " << actual;
    throw FormatError(FormatError::Code::TruncatedPayload, offset, msg.str());
}

}  // namespace

std::size_t write_grid_fgd1(const ScalarGrid& grid, std::ostream& sink) {
    std::vector<unsigned char> buf;
    buf.reserve(8 + 8 * static_cast<std::size_t>(grid.ndim()) + 4 * grid.size());
    buf.insert(buf.end(), kMagic.begin(), kMagic.end());
    append_u32(buf, static_cast<std::uint32_t>(grid.ndim()));
    for (int d : grid.dims()) {
        append_u32(buf, static_cast<std::uint32_t>(d));
    }
    for (double s : grid.spacings()) {
        append_f32(buf, static_cast<float>(s));
    }
    for (float v : grid.values()) {
        append_f32(buf, v);
    }
    sink.write(reinterpret_cast<const char*>(buf.data()),
               static_cast<std::streamsize>(buf.size()));
    if (!sink) {
        throw IoError("write failure while emitting FGD1 stream");
    }
    return buf.size();
}

ScalarGrid read_grid_fgd1(std::istream& source) {
    unsigned char header[8];
    std::size_t got = read_bytes(source, header, 8);
    if (got < 4) {
        truncated(0, 4, got, "header");
    }
    if (!std::equal(kMagic.begin(), kMagic.end(), header)) {
        throw FormatError(FormatError::Code::BadMagic, 0, "bad magic, expected \"FGD1\"");
    }
    if (got < 8) {
        truncated(4, 4, got - 4, "header");
    }
    const std::uint32_t ndim = load_u32(header + 4);
    if (ndim != 2 && ndim != 3) {
        throw FormatError(FormatError::Code::BadRank, 4,
                          "rank must be 2 or 3, got " + std::to_string(ndim));
    }

    std::vector<int> dims(ndim);
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < ndim; ++i) {
        const std::size_t offset = 8 + 4 * i;
        unsigned char raw[4];
        got = read_bytes(source, raw, 4);
        if (got < 4) {
            truncated(offset, 4, got, "header");
        }
        const std::uint32_t d = load_u32(raw);
        if (d < 1) {
            throw FormatError(FormatError::Code::BadDims, offset,
                              "extent must be >= 1 on axis " + std::to_string(i));
        }
        if (d > 0x40000000u) {
            throw FormatError(FormatError::Code::BadDims, offset,
                              "extent too large on axis " + std::to_string(i));
        }
        dims[i] = static_cast<int>(d);
        count *= d;
    }

    std::vector<double> spacing(ndim);
    for (std::uint32_t i = 0; i < ndim; ++i) {
        const std::size_t offset = 8 + 4 * ndim + 4 * i;
        unsigned char raw[4];
        got = read_bytes(source, raw, 4);
        if (got < 4) {
            truncated(offset, 4, got, "header");
        }
        const float s = load_f32(raw);
        if (!std::isfinite(s) || !(s > 0.0f)) {
            throw FormatError(FormatError::Code::InvalidSpacing, offset,
                              "spacing must be finite and > 0 on axis " + std::to_string(i));
        }
        spacing[i] = s;
    }

    const std::size_t payload_offset = 8 + 8 * static_cast<std::size_t>(ndim);
    const std::uint64_t expected = count * 4;
    // Chunked read so corrupt extents cannot trigger a huge allocation.
    std::vector<unsigned char> payload;
    payload.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(expected, 1u << 26)));
    std::uint64_t remaining = expected;
    unsigned char chunk[65536];
    while (remaining > 0) {
        const std::size_t want =
            static_cast<std::size_t>(std::min<std::uint64_t>(remaining, sizeof(chunk)));
        got = read_bytes(source, chunk, want);
        payload.insert(payload.end(), chunk, chunk + got);
        remaining -= got;
        if (got < want) {
            truncated(payload_offset, static_cast<std::size_t>(expected), payload.size(),
                      "payload");
        }
    }
    if (source.peek() != std::char_traits<char>::eof()) {
        throw FormatError(FormatError::Code::TruncatedPayload,
                          payload_offset + static_cast<std::size_t>(expected),
                          "trailing data after payload; expected exactly " +
                              std::to_string(expected) + " payload bytes");
    }

    ScalarGrid grid(static_cast<int>(ndim), dims, spacing, 0.0f);
    float* data = grid.data();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        data[i] = load_f32(payload.data() + 4 * i);
    }
    return grid;
}

namespace {

// Next header token, skipping whitespace and '#' comment lines; `offset`
// tracks the stream position for diagnostics.
std::string next_pgm_token(std::istream& is, std::size_t& offset) {
    std::string token;
    int c = is.get();
    while (c != std::char_traits<char>::eof()) {
        ++offset;
        if (c == '#') {
            while (c != std::char_traits<char>::eof() && c != '\n') {
                c = is.get();
                ++offset;
            }
        } else if (!std::isspace(c)) {
            break;
        }
        c = is.get();
    }
    while (c != std::char_traits<char>::eof() && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = is.get();
        ++offset;
    }
    // The terminating whitespace byte has been consumed, as PGM requires
    // after the maxval field.
    return token;
}

long parse_pgm_number(const std::string& token, std::size_t offset, const char* field) {
    if (token.empty() || token.size() > 9 ||
        !std::all_of(token.begin(), token.end(),
                     [](unsigned char ch) { return std::isdigit(ch); })) {
        throw FormatError(FormatError::Code::MalformedHeader, offset,
                          std::string("malformed PGM ") + field + " field");
    }
    return std::stol(token);
}

}  // namespace

ScalarGrid read_pgm(std::istream& source) {
    unsigned char magic[2];
    const std::size_t got_magic = read_bytes(source, magic, 2);
    if (got_magic < 2 || magic[0] != 'P' || magic[1] != '5') {
        throw FormatError(FormatError::Code::UnsupportedFormat, 0,
                          "unsupported format: only binary PGM (\"P5\") is accepted");
    }
    std::size_t offset = 2;
    const long width = parse_pgm_number(next_pgm_token(source, offset), offset, "width");
    const long height = parse_pgm_number(next_pgm_token(source, offset), offset, "height");
    const long maxval = parse_pgm_number(next_pgm_token(source, offset), offset, "maxval");
    if (width < 1 || height < 1) {
        throw FormatError(FormatError::Code::MalformedHeader, offset,
                          "PGM dimensions must be >= 1");
    }
    if (maxval < 1 || maxval > 65535) {
        throw FormatError(FormatError::Code::MalformedHeader, offset,
                          "PGM maxval must lie in [1, 65535], got " + std::to_string(maxval));
    }

    const int bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t expected = n * static_cast<std::size_t>(bytes_per_sample);
    std::vector<unsigned char> payload(expected);
    const std::size_t got = read_bytes(source, payload.data(), expected);
    if (got < expected) {
        truncated(offset, expected, got, "PGM payload");
    }
    if (source.peek() != std::char_traits<char>::eof()) {
        throw FormatError(FormatError::Code::TruncatedPayload, offset + expected,
                          "trailing data after PGM payload");
    }

    const int dims[2] = {static_cast<int>(height), static_cast<int>(width)};
    const double spacing[2] = {1.0, 1.0};
    ScalarGrid grid(2, dims, spacing, 0.0f);
    float* data = grid.data();
    const float scale = 1.0f / static_cast<float>(maxval);
    if (bytes_per_sample == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            data[i] = static_cast<float>(payload[i]) * scale;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const unsigned sample = (static_cast<unsigned>(payload[2 * i]) << 8) |
                                    static_cast<unsigned>(payload[2 * i + 1]);
            data[i] = static_cast<float>(sample) * scale;
        }
    }
    return grid;
}

std::size_t write_pgm_preview(const ScalarGrid& grid, std::ostream& sink) {
    if (grid.ndim() != 2) {
        throw std::invalid_argument("write_pgm_preview: previews are 2D only");
    }
    float lo = std::numeric_limits<float>::max();
    float hi = std::numeric_limits<float>::lowest();
    for (float v : grid.values()) {
        if (v < kInfSentinel) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    const bool constant = !(hi > lo);

    std::ostringstream header;
    header << "P5\n" << grid.width() << ' ' << grid.height() << "\n255\n";
    const std::string head = header.str();

    std::vector<unsigned char> pixels;
    pixels.reserve(grid.size());
    const double span = constant ? 1.0 : static_cast<double>(hi) - static_cast<double>(lo);
    for (float v : grid.values()) {
        if (v >= kInfSentinel) {
            pixels.push_back(255);
        } else if (constant) {
            pixels.push_back(0);
        } else {
            const double scaled = (static_cast<double>(v) - lo) * 255.0 / span;
            pixels.push_back(static_cast<unsigned char>(std::floor(scaled + 0.5)));
        }
    }
    sink.write(head.data(), static_cast<std::streamsize>(head.size()));
    sink.write(reinterpret_cast<const char*>(pixels.data()),
               static_cast<std::streamsize>(pixels.size()));
    if (!sink) {
        throw IoError("write failure while emitting PGM preview");
    }
    return head.size() + pixels.size();
}

ScalarGrid read_grid_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw IoError("cannot open for reading: " + path);
    }
    const int first = is.peek();
    if (first == 'P') {
        return read_pgm(is);
    }
    return read_grid_fgd1(is);
}

void write_fgd1_file(const ScalarGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open for writing: " + path);
    }
    write_grid_fgd1(grid, os);
    os.flush();
    if (!os) {
        throw IoError("write failure: " + path);
    }
}

void write_preview_file(const ScalarGrid& grid, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw IoError("cannot open for writing: " + path);
    }
    write_pgm_preview(grid, os);
    os.flush();
    if (!os) {
        throw IoError("write failure: " + path);
    }
}

}  // namespace geodist
