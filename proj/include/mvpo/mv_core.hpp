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

// Motion-vector domain types, the signed 0-th order Exp-Golomb bit model and
// the Lagrangian cost shared by the encoder model, the embedders and the
// analyzer.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "errors.hpp"

namespace mvpo {

// Component range of a motion vector in quarter-pel units.
inline constexpr int kMvMin = -8192;
inline constexpr int kMvMax = 8191;

// Signaled differences are stored as i16 in the stream format.
inline constexpr int kMvdMin = -32768;
inline constexpr int kMvdMax = 32767;

constexpr bool mv_component_in_range(long long v) noexcept
{
    return v >= kMvMin && v <= kMvMax;
}

// Displacement in quarter-pel units.
struct MotionVector {
    int x = 0;
    int y = 0;

    constexpr bool operator==(const MotionVector&) const = default;

    static MotionVector checked(long long x, long long y)
    {
        if (!mv_component_in_range(x) || !mv_component_in_range(y))
            throw std::out_of_range("motion vector (" + std::to_string(x) + "," + std::to_string(y) +
                                    ") outside [" + std::to_string(kMvMin) + "," + std::to_string(kMvMax) + "]");
        return {static_cast<int>(x), static_cast<int>(y)};
    }
};

constexpr bool in_range(const MotionVector& mv) noexcept
{
    return mv_component_in_range(mv.x) && mv_component_in_range(mv.y);
}

// mvd = mv - mvp_idx, componentwise.
struct Mvd {
    int dx = 0;
    int dy = 0;

    constexpr bool operator==(const Mvd&) const = default;
};

constexpr bool in_range(const Mvd& d) noexcept
{
    return d.dx >= kMvdMin && d.dx <= kMvdMax && d.dy >= kMvdMin && d.dy <= kMvdMax;
}

constexpr Mvd mvd_of(const MotionVector& mv, const MotionVector& mvp) noexcept
{
    return {mv.x - mvp.x, mv.y - mvp.y};
}

// mv = mvd + mvp. Throws std::out_of_range when the sum leaves the MV range.
inline MotionVector apply_mvd(const MotionVector& mvp, const Mvd& mvd)
{
    return MotionVector::checked(static_cast<long long>(mvp.x) + mvd.dx,
                                 static_cast<long long>(mvp.y) + mvd.dy);
}

// The two-entry AMVP predictor list. Duplicate entries are legal.
struct CandidatePair {
    MotionVector mvp0;
    MotionVector mvp1;

    constexpr bool operator==(const CandidatePair&) const = default;

    constexpr const MotionVector& operator[](int idx) const { return idx == 0 ? mvp0 : mvp1; }
    constexpr bool identical() const noexcept { return mvp0 == mvp1; }
};

// HM motion-estimation lambda: sqrt(0.85 * 2^((QP - 12) / 3)).
inline double default_lambda(int qp)
{
    return std::sqrt(0.85 * std::pow(2.0, (qp - 12) / 3.0));
}

struct RdParams {
    int qp = 25;
    double lambda_motion = default_lambda(25);
    int search_range = 8; // integer pels
    int pu_size = 16;     // pels

    static RdParams for_qp(int qp, int search_range = 8, int pu_size = 16)
    {
        RdParams p;
        p.qp = qp;
        p.lambda_motion = default_lambda(qp);
        p.search_range = search_range;
        p.pu_size = pu_size;
        p.validate();
        return p;
    }

    void validate() const
    {
        if (qp < 0 || qp > 51)
            throw UsageError("qp must be in [0,51], got " + std::to_string(qp));
        if (!(lambda_motion > 0.0) || !std::isfinite(lambda_motion))
            throw UsageError("lambda_motion must be positive");
        if (search_range < 1)
            throw UsageError("search_range must be >= 1");
        if (!valid_pu_size(pu_size))
            throw UsageError("pu_size must be one of 8, 16, 32, 64");
    }

    static constexpr bool valid_pu_size(int s) noexcept { return s == 8 || s == 16 || s == 32 || s == 64; }
};

// Length of the unsigned 0-th order Exp-Golomb codeword for codeNum:
// 2*floor(log2(codeNum + 1)) + 1.
constexpr int ue_bits(std::uint64_t code_num) noexcept
{
    return 2 * (std::bit_width(code_num + 1) - 1) + 1;
}

// se(v) mapping: positive values to odd codeNums (2v - 1), the rest to -2v.
constexpr std::uint64_t se_code_num(long long v) noexcept
{
    return v > 0 ? static_cast<std::uint64_t>(2 * v - 1) : static_cast<std::uint64_t>(-2 * v);
}

constexpr int se_bits(long long v) noexcept
{
    return ue_bits(se_code_num(v));
}

// R = Bits(mvd) + Bits(idx), with a one-bit predictor index.
constexpr int rate_of(const Mvd& mvd) noexcept
{
    return se_bits(mvd.dx) + se_bits(mvd.dy) + 1;
}

// J = D + lambda * R
inline double rd_cost(double distortion, long long rate_bits, const RdParams& params)
{
    return distortion + params.lambda_motion * static_cast<double>(rate_bits);
}

} // namespace mvpo
