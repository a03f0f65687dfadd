#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "insar/bp_imaging.hpp"
#include "insar/grid.hpp"

namespace insar::io {

// Grid file layout (little-endian throughout):
//
//   offset  size  field
//   0       4     magic "ISRG"
//   4       2     version (u16) = 1
//   6       1     dtype (u8): 0 = complex f64 interleaved (re, im), 1 = real f64
//   7       4     rows (u32)
//   11      4     cols (u32)
//   15      8     pixel_spacing (f64, meters)
//   23      ...   rows * cols elements, row-major

enum class GridDtype : std::uint8_t { Complex64 = 0, Real64 = 1 };

inline constexpr std::array<char, 4> kGridMagic{'I', 'S', 'R', 'G'};
inline constexpr std::uint16_t kGridVersion = 1;
inline constexpr std::size_t kGridHeaderSize = 23;

struct GridFileHeader {
    std::uint16_t version = kGridVersion;
    GridDtype dtype = GridDtype::Complex64;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    double pixel_spacing = 0.0;

    std::size_t payload_bytes() const;
};

std::vector<std::uint8_t> encode_grid(const ComplexGrid& grid, double pixel_spacing);
std::vector<std::uint8_t> encode_grid(const RealGrid& grid, double pixel_spacing);
/// Throws FormatError on a bad magic, version, dtype, or payload length.
GridFileHeader decode_header(const std::vector<std::uint8_t>& bytes);
ComplexGrid decode_complex_grid(const std::vector<std::uint8_t>& bytes);
RealGrid decode_real_grid(const std::vector<std::uint8_t>& bytes);

void write_grid(const std::filesystem::path& path, const ComplexGrid& grid, double pixel_spacing);
void write_grid(const std::filesystem::path& path, const RealGrid& grid, double pixel_spacing);
GridFileHeader read_grid_header(const std::filesystem::path& path);
ComplexGrid read_complex_grid(const std::filesystem::path& path);
RealGrid read_real_grid(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

/// RGB for a phase in (-pi, pi] on a cyclic hue wheel; -pi and pi map to the same color.
std::array<std::uint8_t, 3> phase_color(double phase);

/// Wrapped phase of `image` rendered through phase_color as an 8-bit RGB PNG.
void export_phase_png(const ComplexGrid& image, const std::filesystem::path& path);
void export_phase_png(const RealGrid& phase, const std::filesystem::path& path);

}  // namespace insar::io
