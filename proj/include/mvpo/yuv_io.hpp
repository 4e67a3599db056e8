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

// Raw planar YUV 4:2:0 (I420) input. Only the luma plane is kept.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "codec.hpp"
#include "errors.hpp"
#include "file_io.hpp"

namespace mvpo {

struct YuvSpec {
    int width = 0;
    int height = 0;
    std::uint32_t frame_count = 0;

    std::uint64_t luma_bytes() const { return static_cast<std::uint64_t>(width) * height; }
    std::uint64_t frame_bytes() const { return luma_bytes() * 3 / 2; }
    std::uint64_t file_bytes() const { return frame_bytes() * frame_count; }
};

// Frame-at-a-time reader; holds at most one frame in memory.
class YuvReader {
public:
    YuvReader(const std::filesystem::path& path, const YuvSpec& spec) : spec_(spec), path_(path)
    {
        if (spec.width <= 0 || spec.height <= 0 || spec.width % 2 != 0 || spec.height % 2 != 0)
            throw UsageError("YUV 4:2:0 needs positive even dimensions");
        std::error_code ec;
        const std::uintmax_t actual = std::filesystem::file_size(path, ec);
        if (ec)
            throw IoError("cannot stat " + path.string());
        if (actual != spec.file_bytes())
            throw IoError("size mismatch for " + path.string() + ": expected " + std::to_string(spec.file_bytes()) +
                          " bytes, actual " + std::to_string(actual));
        in_.open(path, std::ios::binary);
        if (!in_)
            throw IoError("cannot open " + path.string());
    }

    const YuvSpec& spec() const noexcept { return spec_; }
    std::uint32_t frames_read() const noexcept { return read_; }

    // Returns false once every frame has been consumed.
    bool next(Plane& luma)
    {
        if (read_ >= spec_.frame_count)
            return false;
        luma = Plane(spec_.width, spec_.height);
        in_.read(reinterpret_cast<char*>(luma.samples.data()), static_cast<std::streamsize>(spec_.luma_bytes()));
        in_.seekg(static_cast<std::streamoff>(spec_.frame_bytes() - spec_.luma_bytes()), std::ios::cur);
        if (!in_)
            throw IoError("short read in frame " + std::to_string(read_) + " of " + path_.string());
        ++read_;
        return true;
    }

private:
    YuvSpec spec_;
    std::filesystem::path path_;
    std::ifstream in_;
    std::uint32_t read_ = 0;
};

inline std::vector<Plane> read_yuv(const std::filesystem::path& path, const YuvSpec& spec)
{
    YuvReader reader(path, spec);
    std::vector<Plane> frames;
    frames.reserve(spec.frame_count);
    Plane p;
    while (reader.next(p))
        frames.push_back(std::move(p));
    return frames;
}

// Writes luma planes as I420 with neutral (128) chroma.
inline void write_yuv(const std::filesystem::path& path, std::span<const Plane> frames)
{
    std::vector<std::uint8_t> bytes;
    for (const Plane& f : frames) {
        if (f.width % 2 != 0 || f.height % 2 != 0)
            throw UsageError("YUV 4:2:0 needs even dimensions");
        bytes.insert(bytes.end(), f.samples.begin(), f.samples.end());
        bytes.insert(bytes.end(), f.samples.size() / 2, 128);
    }
    write_file_atomic(path, bytes);
}

} // namespace mvpo
