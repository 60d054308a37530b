#ifndef PGRID_GEO_RASTER_IO_H_
#define PGRID_GEO_RASTER_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "pgrid/geo/types.h"

namespace pgrid::geo {

// PGRD raster container, little-endian:
//
//   offset  size  field
//   0       4     magic "PGRD"
//   4       1     version (1)
//   5       1     dtype (0 = uint8, 1 = float32)
//   6       2     channels (u16)
//   8       4     width (u32)
//   12      4     height (u32)
//   16      48    affine f64 x 6: origin_x, px_w, rot_x, origin_y, rot_y, px_h
//   64      4     epsg (u32)
//   68      1     nodata flag (0 or 1)
//   69      8     nodata value (f64; must be +0.0 when the flag is 0)
//   77      ...   payload, channel-planar row-major
//
// The encoding is canonical: decoding then re-encoding reproduces the input
// bytes exactly, and anything that would not round-trip is rejected.
inline constexpr std::size_t kPgrdHeaderSize = 77;
inline constexpr std::uint8_t kPgrdVersion = 1;

using AnyRaster = std::variant<ByteRaster, FloatRaster>;

std::vector<std::uint8_t> EncodeRaster(const AnyRaster& raster);
// Throws FormatError naming the offending byte offset.
AnyRaster DecodeRaster(std::span<const std::uint8_t> bytes);

AnyRaster ReadRaster(const std::filesystem::path& path);
void WriteRaster(const AnyRaster& raster, const std::filesystem::path& path);

// Reads a raster and converts it to float32. uint8 data is scaled by 1/255
// when `normalize_bytes` is set, otherwise copied verbatim.
FloatRaster ReadFloatRaster(const std::filesystem::path& path,
                            bool normalize_bytes = false);

std::size_t DTypeSize(DType dtype);

}  // namespace pgrid::geo

#endif  // PGRID_GEO_RASTER_IO_H_
