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

// Deterministic synthetic luma sequences spanning the motion-search
// difficulty range. Motion amplitudes use the MV convention: content at
// (x, y) in frame t is found at (x + ax, y + ay) in frame t-1, so an ideal
// search returns (4*ax, 4*ay) quarter-pel.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "codec.hpp"
#include "errors.hpp"

namespace mvpo {

enum class SynthPattern {
    GlobalShift,
    MultiObject,
    NoiseTexture,
};

inline const char* to_string(SynthPattern p)
{
    switch (p) {
    case SynthPattern::GlobalShift: return "global";
    case SynthPattern::MultiObject: return "multi";
    case SynthPattern::NoiseTexture: return "noise";
    }
    return "?";
}

inline SynthPattern parse_synth_pattern(const std::string& s)
{
    if (s == "global" || s == "GlobalShift")
        return SynthPattern::GlobalShift;
    if (s == "multi" || s == "MultiObject")
        return SynthPattern::MultiObject;
    if (s == "noise" || s == "NoiseTexture")
        return SynthPattern::NoiseTexture;
    throw UsageError("unknown synthetic pattern '" + s + "' (global, multi, noise)");
}

// A textured rectangle. (x, y) is its top-left in frame 0; every frame it
// moves by (-vx, -vy), which an ideal search reports as MV (4*vx, 4*vy).
struct MovingObject {
    int x = 0;
    int y = 0;
    int width = 16;
    int height = 16;
    int vx = 0;
    int vy = 0;
};

struct SynthSpec {
    SynthPattern pattern = SynthPattern::GlobalShift;
    int amp_x = 1; // GlobalShift, pels per frame
    int amp_y = 0;
    std::uint64_t seed = 0;
    int width = 64;
    int height = 64;
    std::uint32_t frame_count = 2;
    int object_count = 2;              // MultiObject, used when `objects` is empty
    std::vector<MovingObject> objects; // MultiObject, explicit trajectories

    void validate() const
    {
        if (width <= 0 || height <= 0 || width % 8 != 0 || height % 8 != 0)
            throw UsageError("synthetic dimensions must be positive multiples of 8");
        if (frame_count == 0)
            throw UsageError("synthetic sequence needs at least one frame");
        if (pattern == SynthPattern::MultiObject && objects.empty() && object_count < 0)
            throw UsageError("object_count must be >= 0");
    }
};

namespace detail {

inline int wrap(long long v, int n)
{
    const long long m = v % n;
    return static_cast<int>(m < 0 ? m + n : m);
}

inline int draw_int(std::mt19937_64& rng, int lo, int hi)
{
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Uniform noise softened by one wrapped 3x3 box blur.
inline Plane make_texture(int w, int h, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    Plane noise(w, h);
    for (auto& s : noise.samples)
        s = static_cast<std::uint8_t>(rng() >> 56);
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int sum = 0;
            for (int j = -1; j <= 1; ++j)
                for (int i = -1; i <= 1; ++i)
                    sum += noise.at(wrap(x + i, w), wrap(y + j, h));
            out.at(x, y) = static_cast<std::uint8_t>((sum + 4) / 9);
        }
    }
    return out;
}

inline std::vector<MovingObject> default_objects(const SynthSpec& spec)
{
    std::mt19937_64 rng(spec.seed ^ 0x5bd1e995ULL);
    std::vector<MovingObject> objs;
    for (int k = 0; k < spec.object_count; ++k) {
        MovingObject o;
        o.width = draw_int(rng, std::max(8, spec.width / 4), std::max(8, spec.width / 2));
        o.height = draw_int(rng, std::max(8, spec.height / 4), std::max(8, spec.height / 2));
        o.x = draw_int(rng, 0, spec.width - 1);
        o.y = draw_int(rng, 0, spec.height - 1);
        o.vx = draw_int(rng, -3, 3);
        o.vy = draw_int(rng, -3, 3);
        objs.push_back(o);
    }
    return objs;
}

} // namespace detail

inline std::vector<Plane> synthesize(const SynthSpec& spec)
{
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    std::vector<Plane> frames;
    frames.reserve(spec.frame_count);

    switch (spec.pattern) {
    case SynthPattern::GlobalShift: {
        const Plane tex = detail::make_texture(w, h, spec.seed);
        for (std::uint32_t t = 0; t < spec.frame_count; ++t) {
            Plane f(w, h);
            const long long ox = static_cast<long long>(t) * spec.amp_x;
            const long long oy = static_cast<long long>(t) * spec.amp_y;
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x)
                    f.at(x, y) = tex.at(detail::wrap(x + ox, w), detail::wrap(y + oy, h));
            frames.push_back(std::move(f));
        }
        break;
    }
    case SynthPattern::MultiObject: {
        const Plane background = detail::make_texture(w, h, spec.seed);
        const std::vector<MovingObject> objs = spec.objects.empty() ? detail::default_objects(spec) : spec.objects;
        std::vector<Plane> textures;
        for (std::size_t k = 0; k < objs.size(); ++k)
            textures.push_back(detail::make_texture(objs[k].width, objs[k].height, spec.seed + 1 + k));
        for (std::uint32_t t = 0; t < spec.frame_count; ++t) {
            Plane f = background;
            for (std::size_t k = 0; k < objs.size(); ++k) {
                const MovingObject& o = objs[k];
                const long long px = o.x - static_cast<long long>(t) * o.vx;
                const long long py = o.y - static_cast<long long>(t) * o.vy;
                for (int j = 0; j < o.height; ++j)
                    for (int i = 0; i < o.width; ++i)
                        f.at(detail::wrap(px + i, w), detail::wrap(py + j, h)) = textures[k].at(i, j);
            }
            frames.push_back(std::move(f));
        }
        break;
    }
    case SynthPattern::NoiseTexture:
        for (std::uint32_t t = 0; t < spec.frame_count; ++t)
            frames.push_back(detail::make_texture(w, h, spec.seed * 1000003ULL + t));
        break;
    }
    return frames;
}

} // namespace mvpo
