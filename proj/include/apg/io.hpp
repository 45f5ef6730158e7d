// Copyright 2026 The apgsearch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Binary and text file formats. All binary integers and floats are
// little-endian regardless of the host.
//
//   dense  : "RVC1" u32 dim, u64 count, count*dim f32 (row-major)
//   gt     : "GT01" u32 k, u64 queries, queries*k (u32 id, f32 dist)
//   strings: UTF-8, one item per line, blank lines skipped
//   sparse : one vector per line, space separated "term:weight"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apg/common.hpp"
#include "apg/dataset.hpp"
#include "apg/eval.hpp"

namespace apg {

namespace io_detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError(path.string() + ": write failed");
}

/// Appends little-endian encodings to a byte string.
class ByteWriter {
 public:
  void magic(std::string_view m) { buf_.append(m); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

  const std::string& bytes() const noexcept { return buf_; }
  void reserve(std::size_t n) { buf_.reserve(n); }

 private:
  std::string buf_;
};

/// Bounds-checked little-endian decoder. Errors report the byte offset.
class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string name) : bytes_(bytes), name_(std::move(name)) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  [[noreturn]] void fail(const std::string& what, std::size_t at) const {
    throw FormatError(name_ + ": " + what + " at byte offset " + std::to_string(at));
  }

  void expect_magic(std::string_view m) {
    need(m.size(), "truncated header");
    if (bytes_.substr(pos_, m.size()) != m) fail("bad magic, expected \"" + std::string(m) + "\"", pos_);
    pos_ += m.size();
  }
  std::uint8_t u8() {
    need(1, "truncated data");
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32() {
    need(4, "truncated data");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8, "truncated data");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) fail(what, pos_);
  }
  void expect_end() const {
    if (remaining() != 0) fail("unexpected trailing bytes", pos_);
  }

 private:
  std::string_view bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

/// Decodes one UTF-8 line. Returns false on malformed input.
inline bool decode_utf8(std::string_view in, std::u32string& out) {
  out.clear();
  std::size_t i = 0;
  while (i < in.size()) {
    const auto b0 = static_cast<unsigned char>(in[i]);
    std::size_t len;
    char32_t cp;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xe0) == 0xc0) {
      len = 2;
      cp = b0 & 0x1f;
    } else if ((b0 & 0xf0) == 0xe0) {
      len = 3;
      cp = b0 & 0x0f;
    } else if ((b0 & 0xf8) == 0xf0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      return false;
    }
    if (i + len > in.size()) return false;
    for (std::size_t j = 1; j < len; ++j) {
      const auto b = static_cast<unsigned char>(in[i + j]);
      if ((b & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3f);
    }
    // Overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    out.push_back(cp);
    i += len;
  }
  return true;
}

inline void encode_utf8(std::u32string_view in, std::string& out) {
  for (char32_t cp : in) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }
}

/// Splits on '\n', dropping a trailing '\r' and the empty tail after a
/// final newline. Calls fn(line, 1-based line number).
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(line, line_no);
  }
}

}  // namespace io_detail

// ---------------------------------------------------------------- dense

inline std::string encode_dense(const DenseDataset& data) {
  io_detail::ByteWriter w;
  w.reserve(16 + data.raw().size() * 4);
  w.magic("RVC1");
  w.u32(data.dimension());
  w.u64(data.size());
  for (float x : data.raw()) w.f32(x);
  return w.bytes();
}

inline DenseDataset decode_dense(std::string_view bytes, const std::string& name = "dense") {
  io_detail::ByteReader r(bytes, name);
  r.expect_magic("RVC1");
  const std::size_t dim_at = r.offset();
  const std::uint32_t dim = r.u32();
  if (dim == 0) r.fail("zero dimension", dim_at);
  const std::uint64_t count = r.u64();
  if (count == 0) r.fail("empty dataset", r.offset() - 8);
  if (count > r.remaining() / 4 / dim) r.fail("truncated payload", r.offset());
  std::vector<float> data(count * dim);
  for (auto& x : data) {
    const std::size_t at = r.offset();
    x = r.f32();
    if (!std::isfinite(x)) r.fail("non-finite coordinate", at);
  }
  r.expect_end();
  return DenseDataset(dim, std::move(data));
}

inline void write_dense(const std::filesystem::path& path, const DenseDataset& data) {
  io_detail::write_file(path, encode_dense(data));
}

inline DenseDataset read_dense(const std::filesystem::path& path) {
  return decode_dense(io_detail::read_file(path), path.string());
}

// ---------------------------------------------------------------- strings

inline StringDataset decode_strings(std::string_view text, const std::string& name = "strings") {
  std::vector<std::u32string> items;
  std::u32string decoded;
  io_detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    if (line.empty()) return;
    if (!io_detail::decode_utf8(line, decoded)) {
      throw FormatError(name + ": invalid UTF-8 on line " + std::to_string(line_no));
    }
    items.push_back(decoded);
  });
  if (items.empty()) throw FormatError(name + ": no items");
  return StringDataset(std::move(items));
}

inline std::string encode_strings(const StringDataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data.item(static_cast<ItemId>(i));
    if (s.empty() || s.find(U'\n') != std::u32string::npos) {
      throw UsageError("string item " + std::to_string(i) + " is empty or contains a newline");
    }
    io_detail::encode_utf8(s, out);
    out.push_back('\n');
  }
  return out;
}

inline StringDataset read_strings(const std::filesystem::path& path) {
  return decode_strings(io_detail::read_file(path), path.string());
}

inline void write_strings(const std::filesystem::path& path, const StringDataset& data) {
  io_detail::write_file(path, encode_strings(data));
}

// ---------------------------------------------------------------- sparse

inline SparseDataset decode_sparse(std::string_view text, const std::string& name = "sparse") {
  std::vector<SparseVector> items;
  io_detail::for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    auto fail = [&](const std::string& what, std::size_t col) {
      throw FormatError(name + ": " + what + " at line " + std::to_string(line_no) + ", column " +
                        std::to_string(col));
    };
    if (line.find_first_not_of(" \t") == std::string_view::npos) fail("empty line", 1);

    SparseVector v;
    std::size_t pos = 0;
    while (pos < line.size()) {
      if (line[pos] == ' ' || line[pos] == '\t') {
        ++pos;
        continue;
      }
      const std::size_t end = std::min(line.find_first_of(" \t", pos), line.size());
      const std::string_view tok = line.substr(pos, end - pos);
      const std::size_t col = pos + 1;
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) fail("malformed token (expected term:weight)", col);

      SparseEntry e;
      const char* tb = tok.data();
      const char* te = tok.data() + colon;
      auto [tp, tec] = std::from_chars(tb, te, e.term);
      if (tec != std::errc{} || tp != te || tb == te) fail("malformed term id", col);
      const char* wb = te + 1;
      const char* we = tok.data() + tok.size();
      auto [wp, wec] = std::from_chars(wb, we, e.weight);
      if (wec != std::errc{} || wp != we || wb == we) fail("malformed weight", col + colon + 1);
      if (!std::isfinite(e.weight) || !(e.weight > 0.0)) fail("weight must be positive and finite", col + colon + 1);
      v.push_back(e);
      pos = end;
    }
    std::sort(v.begin(), v.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.term < b.term; });
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i].term == v[i - 1].term) fail("duplicate term id " + std::to_string(v[i].term), 1);
    }
    items.push_back(std::move(v));
  });
  if (items.empty()) throw FormatError(name + ": no items");
  return SparseDataset(std::move(items));
}

inline std::string encode_sparse(const SparseDataset& data) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < data.size(); ++i) {
    bool first = true;
    for (const auto& e : data.item(static_cast<ItemId>(i))) {
      if (!first) out.push_back(' ');
      first = false;
      auto r = std::to_chars(buf, buf + sizeof buf, e.term);
      out.append(buf, r.ptr);
      out.push_back(':');
      r = std::to_chars(buf, buf + sizeof buf, e.weight);
      out.append(buf, r.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

inline SparseDataset read_sparse(const std::filesystem::path& path) {
  return decode_sparse(io_detail::read_file(path), path.string());
}

inline void write_sparse(const std::filesystem::path& path, const SparseDataset& data) {
  io_detail::write_file(path, encode_sparse(data));
}

// ---------------------------------------------------------------- ground truth

/// Records are written in (f32 dist, id) order so that the file always
/// satisfies the ordering check on read, even when two double distances
/// collapse onto the same float.
inline std::string encode_gt(const GroundTruth& gt) {
  if (gt.k == 0) throw UsageError("ground truth: k must be positive");
  io_detail::ByteWriter w;
  w.reserve(16 + gt.rows.size() * gt.k * 8);
  w.magic("GT01");
  w.u32(gt.k);
  w.u64(gt.rows.size());
  std::vector<std::pair<float, ItemId>> recs;
  for (std::size_t q = 0; q < gt.rows.size(); ++q) {
    const auto& row = gt.rows[q];
    if (row.size() != gt.k) {
      throw UsageError("ground truth: query " + std::to_string(q) + " has " +
                       std::to_string(row.size()) + " records, expected k=" + std::to_string(gt.k));
    }
    recs.clear();
    for (const auto& p : row) recs.emplace_back(static_cast<float>(p.dist), p.id);
    std::sort(recs.begin(), recs.end());
    for (const auto& [d, id] : recs) {
      w.u32(id);
      w.f32(d);
    }
  }
  return w.bytes();
}

inline GroundTruth decode_gt(std::string_view bytes, const std::string& name = "gt") {
  io_detail::ByteReader r(bytes, name);
  r.expect_magic("GT01");
  const std::size_t k_at = r.offset();
  GroundTruth gt;
  gt.k = r.u32();
  if (gt.k == 0) r.fail("k must be positive", k_at);
  const std::uint64_t count = r.u64();
  if (count > r.remaining() / 8 / gt.k) r.fail("truncated payload", r.offset());
  gt.rows.resize(count);
  for (std::uint64_t q = 0; q < count; ++q) {
    auto& row = gt.rows[q];
    row.reserve(gt.k);
    float prev_d = 0.0f;
    ItemId prev_id = 0;
    for (std::uint32_t j = 0; j < gt.k; ++j) {
      const std::size_t at = r.offset();
      const ItemId id = r.u32();
      const float d = r.f32();
      if (!std::isfinite(d) || d < 0.0f) r.fail("invalid distance in query " + std::to_string(q), at);
      if (j > 0 && (d < prev_d || (d == prev_d && id <= prev_id))) {
        r.fail("records out of (dist, id) order in query " + std::to_string(q), at);
      }
      row.push_back({static_cast<Distance>(d), id});
      prev_d = d;
      prev_id = id;
    }
  }
  r.expect_end();
  return gt;
}

inline void write_gt(const std::filesystem::path& path, const GroundTruth& gt) {
  io_detail::write_file(path, encode_gt(gt));
}

inline GroundTruth read_gt(const std::filesystem::path& path) {
  return decode_gt(io_detail::read_file(path), path.string());
}

// ---------------------------------------------------------------- handles

inline DatasetHandle read_dataset(const std::filesystem::path& path, DatasetKind kind) {
  switch (kind) {
    case DatasetKind::kDense: return read_dense(path);
    case DatasetKind::kString: return read_strings(path);
    case DatasetKind::kSparse: return read_sparse(path);
  }
  throw UsageError("unknown dataset kind");
}

}  // namespace apg
