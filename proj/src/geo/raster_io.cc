#include "pgrid/geo/raster_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

namespace pgrid::geo {
namespace {

constexpr char kMagic[4] = {'P', 'G', 'R', 'D'};

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

  void U8(std::uint8_t v) { out_.push_back(v); }
  void U16(std::uint16_t v) { Le(v, 2); }
  void U32(std::uint32_t v) { Le(v, 4); }
  void F64(double v) { Le(std::bit_cast<std::uint64_t>(v), 8); }
  void F32(float v) { Le(std::bit_cast<std::uint32_t>(v), 4); }

 private:
  void Le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back((v >> (8 * i)) & 0xff);
  }
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, std::size_t start)
      : in_(in), pos_(start) {}

  std::uint8_t U8(const char* field) { return static_cast<std::uint8_t>(Le(1, field)); }
  std::uint16_t U16(const char* field) { return static_cast<std::uint16_t>(Le(2, field)); }
  std::uint32_t U32(const char* field) { return static_cast<std::uint32_t>(Le(4, field)); }
  double F64(const char* field) { return std::bit_cast<double>(Le(8, field)); }
  float F32(const char* field) {
    return std::bit_cast<float>(static_cast<std::uint32_t>(Le(4, field)));
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::uint64_t Le(int n, const char* field) {
    if (remaining() < static_cast<std::size_t>(n)) {
      throw FormatError(std::string("truncated PGRD header reading ") + field,
                        pos_);
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += n;
    return v;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

template <typename T>
void EncodeTyped(const Raster<T>& r, std::vector<std::uint8_t>& out) {
  if (r.channels() > std::numeric_limits<std::uint16_t>::max()) {
    throw ValidationError("too many channels for PGRD");
  }
  out.reserve(kPgrdHeaderSize + r.data().size() * sizeof(T));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  Writer w(out);
  w.U8(kPgrdVersion);
  w.U8(static_cast<std::uint8_t>(DTypeOf<T>::value));
  w.U16(static_cast<std::uint16_t>(r.channels()));
  w.U32(static_cast<std::uint32_t>(r.width()));
  w.U32(static_cast<std::uint32_t>(r.height()));
  const AffineGeoref& g = r.georef();
  w.F64(g.origin_x);
  w.F64(g.px_w);
  w.F64(g.rot_x);
  w.F64(g.origin_y);
  w.F64(g.rot_y);
  w.F64(g.px_h);
  w.U32(g.epsg);
  w.U8(r.nodata().has_value() ? 1 : 0);
  w.F64(r.nodata().value_or(0.0));
  if constexpr (std::is_same_v<T, std::uint8_t>) {
    out.insert(out.end(), r.data().begin(), r.data().end());
  } else {
    for (float v : r.data()) w.F32(v);
  }
}

}  // namespace

std::size_t DTypeSize(DType dtype) {
  switch (dtype) {
    case DType::kUInt8:
      return 1;
    case DType::kFloat32:
      return 4;
  }
  return 0;
}

std::vector<std::uint8_t> EncodeRaster(const AnyRaster& raster) {
  std::vector<std::uint8_t> out;
  std::visit([&](const auto& r) { EncodeTyped(r, out); }, raster);
  return out;
}

AnyRaster DecodeRaster(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated PGRD magic", 0);
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("bad magic, expected \"PGRD\"", 0);
  }
  Reader rd(bytes, 4);
  const std::uint8_t version = rd.U8("version");
  if (version != kPgrdVersion) {
    throw FormatError("unsupported PGRD version " + std::to_string(version), 4);
  }
  const std::uint8_t dtype = rd.U8("dtype");
  if (dtype > 1) {
    throw FormatError("unsupported dtype code " + std::to_string(dtype), 5);
  }
  const std::uint16_t channels = rd.U16("channels");
  const std::uint32_t width = rd.U32("width");
  const std::uint32_t height = rd.U32("height");
  AffineGeoref g;
  g.origin_x = rd.F64("origin_x");
  g.px_w = rd.F64("px_w");
  g.rot_x = rd.F64("rot_x");
  g.origin_y = rd.F64("origin_y");
  g.rot_y = rd.F64("rot_y");
  g.px_h = rd.F64("px_h");
  g.epsg = rd.U32("epsg");
  const std::size_t flag_offset = rd.pos();
  const std::uint8_t flag = rd.U8("nodata flag");
  if (flag > 1) {
    throw FormatError("nodata flag must be 0 or 1", flag_offset);
  }
  const std::size_t value_offset = rd.pos();
  const double nodata = rd.F64("nodata value");
  if (flag == 0 && std::bit_cast<std::uint64_t>(nodata) != 0) {
    throw FormatError("nodata value must be zero when the flag is unset",
                      value_offset);
  }
  if (width > std::numeric_limits<int>::max() ||
      height > std::numeric_limits<int>::max()) {
    throw FormatError("raster dimensions too large", 8);
  }

  const std::size_t elem = DTypeSize(static_cast<DType>(dtype));
  const std::size_t count =
      static_cast<std::size_t>(width) * height * channels;
  const std::size_t payload_offset = rd.pos();
  const std::size_t have = bytes.size() - payload_offset;
  if (have < count * elem) {
    throw FormatError("truncated payload: expected " +
                          std::to_string(count * elem) + " bytes, found " +
                          std::to_string(have),
                      bytes.size());
  }
  if (have > count * elem) {
    throw FormatError("trailing bytes after payload",
                      payload_offset + count * elem);
  }
  std::optional<double> nd;
  if (flag) nd = nodata;

  const auto payload = bytes.subspan(payload_offset);
  if (dtype == 0) {
    ByteRaster r(static_cast<int>(width), static_cast<int>(height), channels,
                 std::vector<std::uint8_t>(payload.begin(), payload.end()), g);
    r.set_nodata(nd);
    return r;
  }
  std::vector<float> data(count);
  Reader pr(payload, 0);
  for (std::size_t i = 0; i < count; ++i) data[i] = pr.F32("payload");
  FloatRaster r(static_cast<int>(width), static_cast<int>(height), channels,
                std::move(data), g);
  r.set_nodata(nd);
  return r;
}

AnyRaster ReadRaster(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open raster " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return DecodeRaster(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.reason(), e.offset());
  }
}

void WriteRaster(const AnyRaster& raster, const std::filesystem::path& path) {
  const auto bytes = EncodeRaster(raster);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write raster " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

FloatRaster ReadFloatRaster(const std::filesystem::path& path,
                            bool normalize_bytes) {
  AnyRaster any = ReadRaster(path);
  if (auto* f = std::get_if<FloatRaster>(&any)) return std::move(*f);
  const auto& b = std::get<ByteRaster>(any);
  const float scale = normalize_bytes ? 1.0f / 255.0f : 1.0f;
  std::vector<float> data(b.data().size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = b.data()[i] * scale;
  FloatRaster r(b.width(), b.height(), b.channels(), std::move(data),
                b.georef());
  r.set_nodata(b.nodata());
  return r;
}

}  // namespace pgrid::geo
