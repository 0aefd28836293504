#pragma once

// Minimal ZIP container reader/writer (stored + deflate, no zip64, no encryption)
// on top of zlib. Written archives carry zeroed DOS timestamps so that equal
// inputs always produce equal bytes.

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hexinspect/errors.hpp"

namespace hexinspect {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string_view as_text(std::span<const std::uint8_t> b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

struct ZipEntry {
  std::string name;
  Bytes data;
};

namespace zip_detail {

inline std::uint16_t rd16(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 2 > b.size()) throw ArchiveError("zip: truncated archive");
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}
inline std::uint32_t rd32(std::span<const std::uint8_t> b, std::size_t at) {
  if (at + 4 > b.size()) throw ArchiveError("zip: truncated archive");
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}
inline void wr16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
inline void wr32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

inline std::uint32_t crc(std::span<const std::uint8_t> data) {
  return static_cast<std::uint32_t>(::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

inline Bytes inflate_raw(std::span<const std::uint8_t> in, std::size_t expected) {
  Bytes out(expected);
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) throw ArchiveError("zip: inflate init failed");
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = ::inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) throw ArchiveError("zip: corrupt deflate stream");
  return out;
}

inline Bytes deflate_raw(std::span<const std::uint8_t> in) {
  z_stream zs{};
  if (deflateInit2(&zs, 6, Z_DEFLATED, -MAX_WBITS, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw ArchiveError("zip: deflate init failed");
  Bytes out(deflateBound(&zs, static_cast<uLong>(in.size())));
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = ::deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) throw ArchiveError("zip: deflate failed");
  return out;
}

}  // namespace zip_detail

/// All file entries in central-directory order; directory entries are skipped.
inline std::vector<ZipEntry> zip_read(std::span<const std::uint8_t> zip) {
  using namespace zip_detail;
  if (zip.size() < 22) throw ArchiveError("zip: not an archive (too short)");
  std::size_t eocd = std::string_view::npos;
  const std::size_t stop = zip.size() > 65557 ? zip.size() - 65557 : 0;
  for (std::size_t i = zip.size() - 22 + 1; i-- > stop;) {
    if (rd32(zip, i) == 0x06054b50u) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string_view::npos) throw ArchiveError("zip: end of central directory not found");
  const std::uint16_t count = rd16(zip, eocd + 10);
  const std::uint32_t cd_size = rd32(zip, eocd + 12);
  const std::uint32_t cd_offset = rd32(zip, eocd + 16);
  if (cd_offset == 0xFFFFFFFFu || count == 0xFFFF) throw ArchiveError("zip: zip64 archives are not supported");
  if (static_cast<std::size_t>(cd_offset) + cd_size > eocd) throw ArchiveError("zip: central directory out of bounds");

  std::vector<ZipEntry> entries;
  std::size_t at = cd_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (rd32(zip, at) != 0x02014b50u) throw ArchiveError("zip: bad central directory signature");
    const std::uint16_t flags = rd16(zip, at + 8);
    const std::uint16_t method = rd16(zip, at + 10);
    const std::uint32_t crc_expected = rd32(zip, at + 16);
    const std::uint32_t csize = rd32(zip, at + 20);
    const std::uint32_t usize = rd32(zip, at + 24);
    const std::uint16_t nlen = rd16(zip, at + 28);
    const std::uint16_t xlen = rd16(zip, at + 30);
    const std::uint16_t clen = rd16(zip, at + 32);
    const std::uint32_t local = rd32(zip, at + 42);
    if (at + 46 + nlen > zip.size()) throw ArchiveError("zip: truncated central directory");
    std::string name(reinterpret_cast<const char*>(zip.data() + at + 46), nlen);
    at += 46u + nlen + xlen + clen;

    if (flags & 0x1) throw ArchiveError("zip: encrypted entry '" + name + "'");
    if (!name.empty() && name.back() == '/') continue;
    if (rd32(zip, local) != 0x04034b50u) throw ArchiveError("zip: bad local header for '" + name + "'");
    const std::size_t data_at = local + 30u + rd16(zip, local + 26) + rd16(zip, local + 28);
    if (data_at + csize > zip.size()) throw ArchiveError("zip: entry '" + name + "' out of bounds");
    const auto payload = zip.subspan(data_at, csize);

    ZipEntry e{std::move(name), {}};
    if (method == 0) {
      if (csize != usize) throw ArchiveError("zip: size mismatch in stored entry '" + e.name + "'");
      e.data.assign(payload.begin(), payload.end());
    } else if (method == 8) {
      e.data = inflate_raw(payload, usize);
    } else {
      throw ArchiveError("zip: unsupported compression method " + std::to_string(method) + " in '" + e.name + "'");
    }
    if (crc(e.data) != crc_expected) throw ArchiveError("zip: CRC mismatch in '" + e.name + "'");
    entries.push_back(std::move(e));
  }
  return entries;
}

/// Deflated archive, entries in the given order, zeroed timestamps.
inline Bytes zip_write(const std::vector<ZipEntry>& entries) {
  using namespace zip_detail;
  Bytes out;
  Bytes cd;
  for (const auto& e : entries) {
    const Bytes packed = deflate_raw(e.data);
    const std::uint32_t c = crc(e.data);
    const auto offset = static_cast<std::uint32_t>(out.size());
    const auto nlen = static_cast<std::uint16_t>(e.name.size());

    wr32(out, 0x04034b50u);
    wr16(out, 20);  // version needed
    wr16(out, 0);   // flags
    wr16(out, 8);   // deflate
    wr16(out, 0);   // time
    wr16(out, 0);   // date
    wr32(out, c);
    wr32(out, static_cast<std::uint32_t>(packed.size()));
    wr32(out, static_cast<std::uint32_t>(e.data.size()));
    wr16(out, nlen);
    wr16(out, 0);
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), packed.begin(), packed.end());

    wr32(cd, 0x02014b50u);
    wr16(cd, 20);  // version made by
    wr16(cd, 20);
    wr16(cd, 0);
    wr16(cd, 8);
    wr16(cd, 0);
    wr16(cd, 0);
    wr32(cd, c);
    wr32(cd, static_cast<std::uint32_t>(packed.size()));
    wr32(cd, static_cast<std::uint32_t>(e.data.size()));
    wr16(cd, nlen);
    wr16(cd, 0);  // extra
    wr16(cd, 0);  // comment
    wr16(cd, 0);  // disk
    wr16(cd, 0);  // internal attrs
    wr32(cd, 0);  // external attrs
    wr32(cd, offset);
    cd.insert(cd.end(), e.name.begin(), e.name.end());
  }
  const auto cd_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), cd.begin(), cd.end());
  wr32(out, 0x06054b50u);
  wr16(out, 0);
  wr16(out, 0);
  wr16(out, static_cast<std::uint16_t>(entries.size()));
  wr16(out, static_cast<std::uint16_t>(entries.size()));
  wr32(out, static_cast<std::uint32_t>(cd.size()));
  wr32(out, cd_offset);
  wr16(out, 0);
  return out;
}

}  // namespace hexinspect
