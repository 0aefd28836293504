#pragma once

// PNG encoding of RGBA8 images and tEXt chunk access, on zlib.

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"
#include "hexinspect/raster.hpp"
#include "hexinspect/zip.hpp"

namespace hexinspect {

struct PngChunk {
  std::string type;
  Bytes data;
};

namespace png_detail {

inline constexpr std::array<std::uint8_t, 8> kSignature{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

inline std::uint32_t be32(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 4 > b.size()) throw FormatError("png: truncated chunk");
  return (static_cast<std::uint32_t>(b[at]) << 24) | (static_cast<std::uint32_t>(b[at + 1]) << 16) |
         (static_cast<std::uint32_t>(b[at + 2]) << 8) | b[at + 3];
}

inline void put32(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

inline std::uint32_t chunk_crc(std::string_view type, std::span<const std::uint8_t> data) {
  uLong c = ::crc32(0L, reinterpret_cast<const Bytef*>(type.data()), 4);
  return static_cast<std::uint32_t>(::crc32(c, data.data(), static_cast<uInt>(data.size())));
}

}  // namespace png_detail

inline bool is_png(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 8 && std::equal(png_detail::kSignature.begin(), png_detail::kSignature.end(), bytes.begin());
}

/// Chunks in file order; CRCs are verified.
inline std::vector<PngChunk> read_chunks(std::span<const std::uint8_t> bytes) {
  using namespace png_detail;
  if (!is_png(bytes)) throw FormatError("not a PNG file");
  std::vector<PngChunk> chunks;
  std::size_t at = 8;
  while (at < bytes.size()) {
    const std::uint32_t len = be32(bytes, at);
    if (at + 12 + static_cast<std::size_t>(len) > bytes.size()) throw FormatError("png: truncated chunk");
    PngChunk c;
    c.type.assign(reinterpret_cast<const char*>(&bytes[at + 4]), 4);
    c.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at + 8),
                  bytes.begin() + static_cast<std::ptrdiff_t>(at + 8 + len));
    if (be32(bytes, at + 8 + len) != chunk_crc(c.type, c.data))
      throw FormatError("png: CRC mismatch in chunk '" + c.type + "'");
    at += 12 + len;
    const bool end = c.type == "IEND";
    chunks.push_back(std::move(c));
    if (end) break;
  }
  if (chunks.empty() || chunks.front().type != "IHDR") throw FormatError("png: missing IHDR");
  if (chunks.back().type != "IEND") throw FormatError("png: missing IEND");
  return chunks;
}

inline Bytes write_chunks(const std::vector<PngChunk>& chunks) {
  using namespace png_detail;
  Bytes out(kSignature.begin(), kSignature.end());
  for (const auto& c : chunks) {
    put32(out, static_cast<std::uint32_t>(c.data.size()));
    out.insert(out.end(), c.type.begin(), c.type.end());
    out.insert(out.end(), c.data.begin(), c.data.end());
    put32(out, chunk_crc(c.type, c.data));
  }
  return out;
}

/// RGBA8, no filtering, fixed zlib level: equal images give equal bytes.
inline Bytes encode_png(const Image& img) {
  using namespace png_detail;
  if (img.width <= 0 || img.height <= 0) throw ValidationError("png: empty image");
  Bytes ihdr;
  put32(ihdr, static_cast<std::uint32_t>(img.width));
  put32(ihdr, static_cast<std::uint32_t>(img.height));
  for (std::uint8_t b : {8, 6, 0, 0, 0}) ihdr.push_back(b);
  const std::size_t row = 4 * static_cast<std::size_t>(img.width);
  Bytes raw;
  raw.reserve((row + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), img.rgba.begin() + static_cast<std::ptrdiff_t>(y * row),
               img.rgba.begin() + static_cast<std::ptrdiff_t>((y + 1) * row));
  }
  uLongf len = compressBound(static_cast<uLong>(raw.size()));
  Bytes z(len);
  if (compress2(z.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw Error("png: compression failed");
  z.resize(len);
  return write_chunks({{"IHDR", std::move(ihdr)}, {"IDAT", std::move(z)}, {"IEND", {}}});
}

/// Decodes 8-bit RGBA or RGB non-interlaced PNGs (all filter types).
inline Image decode_png(std::span<const std::uint8_t> bytes) {
  using namespace png_detail;
  const auto chunks = read_chunks(bytes);
  const auto& h = chunks.front().data;
  if (h.size() != 13) throw FormatError("png: bad IHDR");
  const int w = static_cast<int>(be32(h, 0)), ht = static_cast<int>(be32(h, 4));
  if (h[8] != 8 || (h[9] != 6 && h[9] != 2) || h[12] != 0) throw FormatError("png: unsupported pixel format");
  const int channels = h[9] == 6 ? 4 : 3;
  Bytes z;
  for (const auto& c : chunks)
    if (c.type == "IDAT") z.insert(z.end(), c.data.begin(), c.data.end());
  const std::size_t stride = static_cast<std::size_t>(w) * channels;
  uLongf len = static_cast<uLongf>((stride + 1) * ht);
  Bytes raw(len);
  if (uncompress(raw.data(), &len, z.data(), static_cast<uLong>(z.size())) != Z_OK || len != raw.size())
    throw FormatError("png: corrupt image data");
  Bytes cur(stride), prev(stride, 0);
  Image img{w, ht, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * ht * 4)};
  for (int y = 0; y < ht; ++y) {
    const std::uint8_t filter = raw[y * (stride + 1)];
    const std::uint8_t* src = &raw[y * (stride + 1) + 1];
    for (std::size_t i = 0; i < stride; ++i) {
      const int a = i >= static_cast<std::size_t>(channels) ? cur[i - channels] : 0;
      const int b = prev[i];
      const int c = i >= static_cast<std::size_t>(channels) ? prev[i - channels] : 0;
      int pred = 0;
      switch (filter) {
        case 0: pred = 0; break;
        case 1: pred = a; break;
        case 2: pred = b; break;
        case 3: pred = (a + b) / 2; break;
        case 4: {
          const int p = a + b - c, pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
          pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          break;
        }
        default: throw FormatError("png: bad filter type");
      }
      cur[i] = static_cast<std::uint8_t>(src[i] + pred);
    }
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < 4; ++k)
        img.rgba[4 * (static_cast<std::size_t>(y) * w + x) + k] =
            k < channels ? cur[static_cast<std::size_t>(x) * channels + k] : 255;
    std::swap(cur, prev);
  }
  return img;
}

/// Sets the tEXt chunk `keyword`, replacing any existing one; placed just
/// before IEND. Other chunks are copied untouched.
inline Bytes embed_text(std::span<const std::uint8_t> png, std::string_view keyword, std::string_view text) {
  auto chunks = read_chunks(png);
  std::vector<PngChunk> out;
  for (auto& c : chunks) {
    if (c.type == "tEXt") {
      const auto nul = std::find(c.data.begin(), c.data.end(), 0);
      if (std::string_view(reinterpret_cast<const char*>(c.data.data()), static_cast<std::size_t>(nul - c.data.begin())) ==
          keyword)
        continue;
    }
    if (c.type == "IEND") {
      PngChunk t{"tEXt", to_bytes(keyword)};
      t.data.push_back(0);
      t.data.insert(t.data.end(), text.begin(), text.end());
      out.push_back(std::move(t));
    }
    out.push_back(std::move(c));
  }
  return write_chunks(out);
}

inline std::optional<std::string> extract_text(std::span<const std::uint8_t> png, std::string_view keyword) {
  for (const auto& c : read_chunks(png)) {
    if (c.type != "tEXt") continue;
    const auto nul = std::find(c.data.begin(), c.data.end(), 0);
    if (nul == c.data.end()) continue;
    const std::string_view key(reinterpret_cast<const char*>(c.data.data()), static_cast<std::size_t>(nul - c.data.begin()));
    if (key == keyword) return std::string(nul + 1, c.data.end());
  }
  return std::nullopt;
}

}  // namespace hexinspect
