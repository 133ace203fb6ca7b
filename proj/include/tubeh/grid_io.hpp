#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "tubeh/grid_field.hpp"

namespace tubeh {

// Header: "TGF1", u32 n, u32 N, u32 d, f64 L, u32 side, zero padding to 64 bytes.
// Payload: interleaved little-endian (re, im) doubles, [point][channel], row-major.
static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");

inline constexpr std::size_t kGridHeaderBytes = 64;

inline void write_binary(const GridField& f, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
    char header[kGridHeaderBytes] = {};
    std::memcpy(header, "TGF1", 4);
    const std::uint32_t n = f.spec().dim, N = static_cast<std::uint32_t>(f.spec().points),
                        d = static_cast<std::uint32_t>(f.value_dim()),
                        side = f.side() == Side::Physical ? 0u : 1u;
    const double L = f.spec().extent;
    std::memcpy(header + 4, &n, 4);
    std::memcpy(header + 8, &N, 4);
    std::memcpy(header + 12, &d, 4);
    std::memcpy(header + 16, &L, 8);
    std::memcpy(header + 24, &side, 4);
    os.write(header, kGridHeaderBytes);
    os.write(reinterpret_cast<const char*>(f.raw().data()),
             static_cast<std::streamsize>(f.raw().size() * sizeof(cplx)));
    if (!os) fail(ErrorKind::IoError, "short write to " + path.string());
}

inline GridField read_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail(ErrorKind::IoError, "cannot open " + path.string());
    char header[kGridHeaderBytes];
    if (!is.read(header, kGridHeaderBytes)) fail(ErrorKind::IoError, "truncated header in " + path.string());
    if (std::memcmp(header, "TGF1", 4) != 0) fail(ErrorKind::IoError, "bad magic in " + path.string());
    std::uint32_t n, N, d, side;
    double L;
    std::memcpy(&n, header + 4, 4);
    std::memcpy(&N, header + 8, 4);
    std::memcpy(&d, header + 12, 4);
    std::memcpy(&L, header + 16, 8);
    std::memcpy(&side, header + 24, 4);
    GridField f(GridSpec::make(static_cast<int>(n), N, L), d, side == 0 ? Side::Physical : Side::Frequency);
    if (!is.read(reinterpret_cast<char*>(f.raw().data()), static_cast<std::streamsize>(f.raw().size() * sizeof(cplx))))
        fail(ErrorKind::IoError, "truncated payload in " + path.string());
    if (!f.all_finite()) fail(ErrorKind::IoError, "non-finite samples in " + path.string());
    return f;
}

/// CSV of a 1-D field: coordinate, then re/im per channel.
inline std::string csv_slice(const GridField& f) {
    if (f.spec().dim != 1) fail(ErrorKind::InvalidGrid, "CSV export supports 1-D fields only");
    std::ostringstream os;
    os << std::setprecision(17) << "t";
    for (std::size_t c = 0; c < f.value_dim(); ++c) os << ",re" << c << ",im" << c;
    os << "\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << f.spec().coordinate(i);
        for (std::size_t c = 0; c < f.value_dim(); ++c) os << "," << f.at(i, c).real() << "," << f.at(i, c).imag();
        os << "\n";
    }
    return os.str();
}

}  // namespace tubeh
