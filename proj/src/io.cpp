#include "insar/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>

#include "insar/error.hpp"
#include "insar/scene.hpp"

namespace insar::io {

namespace {

template <class U>
void put_le(std::vector<std::uint8_t>& out, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<std::uint8_t>((value >> (8 * i)) & 0xFFu));
    }
}

void put_f64(std::vector<std::uint8_t>& out, double value) {
    if (!std::isfinite(value)) throw NumericalError("grid values must be finite");
    put_le(out, std::bit_cast<std::uint64_t>(value));
}

template <class U>
U get_le(const std::vector<std::uint8_t>& in, std::size_t offset) {
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        value |= static_cast<U>(in[offset + i]) << (8 * i);
    }
    return value;
}

double get_f64(const std::vector<std::uint8_t>& in, std::size_t offset) {
    return std::bit_cast<double>(get_le<std::uint64_t>(in, offset));
}

std::vector<std::uint8_t> encode_header(GridDtype dtype, std::size_t rows, std::size_t cols,
                                        double spacing) {
    if (rows > UINT32_MAX || cols > UINT32_MAX) throw FormatError("grid too large for format");
    std::vector<std::uint8_t> out(kGridMagic.begin(), kGridMagic.end());
    put_le<std::uint16_t>(out, kGridVersion);
    out.push_back(static_cast<std::uint8_t>(dtype));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(rows));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cols));
    put_le(out, std::bit_cast<std::uint64_t>(spacing));
    return out;
}

GridFileHeader expect(const std::vector<std::uint8_t>& bytes, GridDtype dtype) {
    GridFileHeader header = decode_header(bytes);
    if (header.dtype != dtype) {
        throw FormatError(dtype == GridDtype::Complex64 ? "expected a complex grid, found real"
                                                        : "expected a real grid, found complex");
    }
    return header;
}

}  // namespace

std::size_t GridFileHeader::payload_bytes() const {
    const std::size_t element = dtype == GridDtype::Complex64 ? 16 : 8;
    return static_cast<std::size_t>(rows) * cols * element;
}

std::vector<std::uint8_t> encode_grid(const ComplexGrid& grid, double pixel_spacing) {
    auto out = encode_header(GridDtype::Complex64, grid.rows(), grid.cols(), pixel_spacing);
    out.reserve(kGridHeaderSize + 16 * grid.size());
    for (const cdouble& v : grid.values()) {
        put_f64(out, v.real());
        put_f64(out, v.imag());
    }
    return out;
}

std::vector<std::uint8_t> encode_grid(const RealGrid& grid, double pixel_spacing) {
    auto out = encode_header(GridDtype::Real64, grid.rows(), grid.cols(), pixel_spacing);
    out.reserve(kGridHeaderSize + 8 * grid.size());
    for (double v : grid.values()) put_f64(out, v);
    return out;
}

GridFileHeader decode_header(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kGridHeaderSize) throw FormatError("grid file shorter than its header");
    if (!std::equal(kGridMagic.begin(), kGridMagic.end(), bytes.begin())) {
        throw FormatError("bad grid magic (expected \"ISRG\")");
    }
    GridFileHeader header;
    header.version = get_le<std::uint16_t>(bytes, 4);
    if (header.version != kGridVersion) {
        throw FormatError("unsupported grid version " + std::to_string(header.version));
    }
    const std::uint8_t dtype = bytes[6];
    if (dtype > 1) throw FormatError("unknown grid dtype " + std::to_string(dtype));
    header.dtype = static_cast<GridDtype>(dtype);
    header.rows = get_le<std::uint32_t>(bytes, 7);
    header.cols = get_le<std::uint32_t>(bytes, 11);
    header.pixel_spacing = get_f64(bytes, 15);
    if (bytes.size() != kGridHeaderSize + header.payload_bytes()) {
        throw FormatError("grid payload is " + std::to_string(bytes.size() - kGridHeaderSize) +
                          " bytes, header implies " + std::to_string(header.payload_bytes()));
    }
    return header;
}

ComplexGrid decode_complex_grid(const std::vector<std::uint8_t>& bytes) {
    const GridFileHeader header = expect(bytes, GridDtype::Complex64);
    ComplexGrid grid(header.rows, header.cols);
    std::size_t at = kGridHeaderSize;
    for (cdouble& v : grid.values()) {
        v = {get_f64(bytes, at), get_f64(bytes, at + 8)};
        at += 16;
    }
    return grid;
}

RealGrid decode_real_grid(const std::vector<std::uint8_t>& bytes) {
    const GridFileHeader header = expect(bytes, GridDtype::Real64);
    RealGrid grid(header.rows, header.cols);
    std::size_t at = kGridHeaderSize;
    for (double& v : grid.values()) {
        v = get_f64(bytes, at);
        at += 8;
    }
    return grid;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading " + path.string());
    return bytes;
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path.string());
}

void write_grid(const std::filesystem::path& path, const ComplexGrid& grid, double pixel_spacing) {
    write_bytes(path, encode_grid(grid, pixel_spacing));
}

void write_grid(const std::filesystem::path& path, const RealGrid& grid, double pixel_spacing) {
    write_bytes(path, encode_grid(grid, pixel_spacing));
}

GridFileHeader read_grid_header(const std::filesystem::path& path) {
    try {
        return decode_header(read_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

ComplexGrid read_complex_grid(const std::filesystem::path& path) {
    try {
        return decode_complex_grid(read_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

RealGrid read_real_grid(const std::filesystem::path& path) {
    try {
        return decode_real_grid(read_bytes(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::array<std::uint8_t, 3> phase_color(double phase) {
    // Hue wheel with full saturation and value.
    const double hue = (wrap_phase(phase) + kPi) / (2.0 * kPi) * 6.0;  // [0, 6]
    const double sector = std::floor(hue);
    const double f = hue - sector;
    const auto to8 = [](double v) { return static_cast<std::uint8_t>(std::lround(255.0 * v)); };
    switch (static_cast<int>(sector) % 6) {
        case 0: return {255, to8(f), 0};
        case 1: return {to8(1.0 - f), 255, 0};
        case 2: return {0, 255, to8(f)};
        case 3: return {0, to8(1.0 - f), 255};
        case 4: return {to8(f), 0, 255};
        default: return {255, 0, to8(1.0 - f)};
    }
}

void export_phase_png(const RealGrid& phase, const std::filesystem::path& path) {
    if (phase.empty()) throw ShapeError("cannot export an empty image");
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> file(std::fopen(path.c_str(), "wb"),
                                                          &std::fclose);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    std::vector<std::uint8_t> row(3 * phase.cols());
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng failed while writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(phase.cols()),
                 static_cast<png_uint_32>(phase.rows()), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < phase.rows(); ++r) {
        for (std::size_t c = 0; c < phase.cols(); ++c) {
            const auto rgb = phase_color(phase(r, c));
            std::copy(rgb.begin(), rgb.end(), row.begin() + static_cast<std::ptrdiff_t>(3 * c));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void export_phase_png(const ComplexGrid& image, const std::filesystem::path& path) {
    RealGrid phase(image.rows(), image.cols());
    for (std::size_t i = 0; i < image.size(); ++i) phase[i] = std::arg(image[i]);
    export_phase_png(phase, path);
}

}  // namespace insar::io
