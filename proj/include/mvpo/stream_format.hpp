/*
Copyright 2026 The mvpo Authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
you may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

// "MVPO" binary stream format, little-endian throughout.
//
//   header (25 bytes)
//     0  magic        "MVPO"
//     4  version      u16   (1)
//     6  width        u16
//     8  height       u16
//    10  pu_size      u8
//    11  qp           u8
//    12  gop          u8    (0 = IPPP)
//    13  frame_count  u32
//    17  record_count u64
//   record (16 bytes, repeated record_count times)
//     0  frame_index  u32
//     4  block_x      u16
//     6  block_y      u16
//     8  idx          u8
//     9  pad          u8    (0)
//    10  mvd.dx       i16
//    12  mvd.dy       i16
//    14  reserved     u16   (0)

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "codec.hpp"
#include "errors.hpp"
#include "file_io.hpp"

namespace mvpo {

inline constexpr std::array<std::uint8_t, 4> kStreamMagic{'M', 'V', 'P', 'O'};
inline constexpr std::uint16_t kStreamVersion = 1;
inline constexpr std::size_t kStreamHeaderSize = 25;
inline constexpr std::size_t kStreamRecordSize = 16;

namespace detail {

class ByteWriter {
public:
    explicit ByteWriter(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }
    void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }

private:
    void put(std::uint64_t v, int n)
    {
        for (int i = 0; i < n; ++i)
            out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t>& out_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }
    std::int16_t i16() { return static_cast<std::int16_t>(u16()); }

private:
    std::uint64_t get(int n)
    {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline std::vector<std::uint8_t> write_stream(const SequenceStream& s)
{
    validate_stream(s);
    std::vector<std::uint8_t> out;
    out.reserve(kStreamHeaderSize + s.records.size() * kStreamRecordSize);
    detail::ByteWriter w(out);
    for (std::uint8_t c : kStreamMagic)
        w.u8(c);
    w.u16(kStreamVersion);
    w.u16(static_cast<std::uint16_t>(s.header.width));
    w.u16(static_cast<std::uint16_t>(s.header.height));
    w.u8(static_cast<std::uint8_t>(s.header.pu_size));
    w.u8(static_cast<std::uint8_t>(s.header.qp));
    w.u8(static_cast<std::uint8_t>(s.header.gop));
    w.u32(s.header.frame_count);
    w.u64(s.records.size());
    for (const PuRecord& r : s.records) {
        w.u32(r.frame_index);
        w.u16(static_cast<std::uint16_t>(r.block_x));
        w.u16(static_cast<std::uint16_t>(r.block_y));
        w.u8(static_cast<std::uint8_t>(r.idx));
        w.u8(0);
        w.i16(static_cast<std::int16_t>(r.mvd.dx));
        w.i16(static_cast<std::int16_t>(r.mvd.dy));
        w.u16(0);
    }
    return out;
}

// Parses and fully validates a stream. Every malformed input raises
// MalformedStream; nothing is guessed or repaired.
inline SequenceStream read_stream(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kStreamMagic.size())
        throw MalformedStream(StreamErrorKind::Truncated, "shorter than the magic");
    for (std::size_t i = 0; i < kStreamMagic.size(); ++i)
        if (bytes[i] != kStreamMagic[i])
            throw MalformedStream(StreamErrorKind::BadMagic, "expected \"MVPO\"");
    if (bytes.size() < 6)
        throw MalformedStream(StreamErrorKind::Truncated, "missing version");
    detail::ByteReader rd(bytes.subspan(4));
    const std::uint16_t version = rd.u16();
    if (version != kStreamVersion)
        throw MalformedStream(StreamErrorKind::UnknownVersion, "version " + std::to_string(version));
    if (bytes.size() < kStreamHeaderSize)
        throw MalformedStream(StreamErrorKind::Truncated, "header is " + std::to_string(bytes.size()) + " bytes");

    SequenceStream s;
    s.header.width = rd.u16();
    s.header.height = rd.u16();
    s.header.pu_size = rd.u8();
    s.header.qp = rd.u8();
    s.header.gop = static_cast<Gop>(rd.u8());
    s.header.frame_count = rd.u32();
    const std::uint64_t record_count = rd.u64();

    const std::size_t body = bytes.size() - kStreamHeaderSize;
    if (record_count > body / kStreamRecordSize)
        throw MalformedStream(StreamErrorKind::Truncated,
                              std::to_string(record_count) + " records declared, " + std::to_string(body) +
                                  " body bytes present");
    if (body != record_count * kStreamRecordSize)
        throw MalformedStream(StreamErrorKind::RecordCountMismatch,
                              std::to_string(body - record_count * kStreamRecordSize) + " trailing bytes");
    validate_header(s.header);
    if (record_count != s.header.expected_records())
        throw MalformedStream(StreamErrorKind::RecordCountMismatch,
                              "header implies " + std::to_string(s.header.expected_records()) + " records, found " +
                                  std::to_string(record_count));

    detail::ByteReader rr(bytes.subspan(kStreamHeaderSize));
    s.records.resize(record_count);
    for (std::uint64_t i = 0; i < record_count; ++i) {
        PuRecord& r = s.records[i];
        r.frame_index = rr.u32();
        r.block_x = rr.u16();
        r.block_y = rr.u16();
        r.idx = rr.u8();
        const std::uint8_t pad = rr.u8();
        r.mvd.dx = rr.i16();
        r.mvd.dy = rr.i16();
        const std::uint16_t reserved = rr.u16();
        if (pad != 0 || reserved != 0)
            throw MalformedStream(StreamErrorKind::FieldRange, "nonzero padding in record " + std::to_string(i));
    }
    validate_stream(s);
    return s;
}

inline void write_stream_file(const std::filesystem::path& path, const SequenceStream& s)
{
    const std::vector<std::uint8_t> bytes = write_stream(s);
    write_file_atomic(path, bytes);
}

inline SequenceStream read_stream_file(const std::filesystem::path& path)
{
    const std::vector<std::uint8_t> bytes = read_file_bytes(path);
    return read_stream(bytes);
}

} // namespace mvpo
