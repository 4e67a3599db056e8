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

// Simplified AMVP inter-prediction model: a flat PU grid, two-entry
// candidate derivation (left, above, co-located fallback), full-search
// integer-pel motion estimation and rate-based predictor selection. Frames
// follow an IPPP... pattern, the first frame is intra and carries no
// records.

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "mv_core.hpp"

namespace mvpo {

// 8-bit luma plane, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> samples;

    Plane() = default;
    Plane(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill)
    {
    }

    std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
    const std::uint8_t* row(int y) const { return samples.data() + static_cast<std::size_t>(y) * width; }
    std::uint8_t* row(int y) { return samples.data() + static_cast<std::size_t>(y) * width; }

    bool operator==(const Plane&) const = default;
};

// Per-PU motion vectors for every frame of a sequence. Entries of the intra
// frame stay zero.
class MvField {
public:
    MvField() = default;
    MvField(int width, int height, int pu_size, int frame_count)
        : cols_(width / pu_size), rows_(height / pu_size), frames_(frame_count), pu_size_(pu_size),
          mvs_(static_cast<std::size_t>(cols_) * rows_ * frame_count)
    {
    }

    int cols() const noexcept { return cols_; }
    int rows() const noexcept { return rows_; }
    int frames() const noexcept { return frames_; }
    int pu_size() const noexcept { return pu_size_; }

    const MotionVector& at(int frame, int col, int row) const { return mvs_[index(frame, col, row)]; }
    MotionVector& at(int frame, int col, int row) { return mvs_[index(frame, col, row)]; }

    // Lookup by the PU's top-left pel coordinates.
    const MotionVector& at_pel(int frame, int block_x, int block_y) const
    {
        return at(frame, block_x / pu_size_, block_y / pu_size_);
    }
    MotionVector& at_pel(int frame, int block_x, int block_y)
    {
        return at(frame, block_x / pu_size_, block_y / pu_size_);
    }

    bool operator==(const MvField&) const = default;

private:
    std::size_t index(int frame, int col, int row) const
    {
        return (static_cast<std::size_t>(frame) * rows_ + row) * cols_ + col;
    }

    int cols_ = 0;
    int rows_ = 0;
    int frames_ = 0;
    int pu_size_ = 16;
    std::vector<MotionVector> mvs_;
};

// Syntax of one AMVP-coded PU as carried by the stream.
struct PuRecord {
    std::uint32_t frame_index = 0;
    int block_x = 0;
    int block_y = 0;
    int idx = 0;
    Mvd mvd;

    bool operator==(const PuRecord&) const = default;
};

enum class Gop : std::uint8_t {
    IPPP = 0,
};

struct StreamHeader {
    int width = 0;
    int height = 0;
    int pu_size = 16;
    int qp = 25;
    Gop gop = Gop::IPPP;
    std::uint32_t frame_count = 0;

    int cols() const noexcept { return width / pu_size; }
    int rows() const noexcept { return height / pu_size; }
    std::uint64_t pus_per_frame() const noexcept { return static_cast<std::uint64_t>(cols()) * rows(); }
    std::uint64_t expected_records() const noexcept
    {
        return frame_count > 1 ? (frame_count - 1) * pus_per_frame() : 0;
    }

    bool operator==(const StreamHeader&) const = default;
};

// Stand-in for a coded bitstream: header plus one record per inter PU in
// decode order (frame, then raster).
struct SequenceStream {
    StreamHeader header;
    std::vector<PuRecord> records;

    bool operator==(const SequenceStream&) const = default;
};

inline void validate_header(const StreamHeader& h)
{
    auto fail = [](const std::string& what) { throw MalformedStream(StreamErrorKind::FieldRange, what); };
    if (!RdParams::valid_pu_size(h.pu_size))
        fail("pu_size " + std::to_string(h.pu_size));
    if (h.width <= 0 || h.height <= 0 || h.width > 65535 || h.height > 65535)
        fail("frame size " + std::to_string(h.width) + "x" + std::to_string(h.height));
    if (h.width % h.pu_size != 0 || h.height % h.pu_size != 0)
        fail("frame size not a multiple of pu_size");
    if (h.qp < 0 || h.qp > 51)
        fail("qp " + std::to_string(h.qp));
    if (h.gop != Gop::IPPP)
        fail("gop tag " + std::to_string(static_cast<int>(h.gop)));
}

// Checks header ranges, record count, decode order and field ranges.
inline void validate_stream(const SequenceStream& s)
{
    const StreamHeader& h = s.header;
    validate_header(h);
    if (s.records.size() != h.expected_records())
        throw MalformedStream(StreamErrorKind::RecordCountMismatch,
                              "expected " + std::to_string(h.expected_records()) + " records, found " +
                                  std::to_string(s.records.size()));
    std::size_t i = 0;
    for (std::uint32_t f = 1; f < h.frame_count; ++f) {
        for (int by = 0; by < h.height; by += h.pu_size) {
            for (int bx = 0; bx < h.width; bx += h.pu_size, ++i) {
                const PuRecord& r = s.records[i];
                if (r.frame_index != f || r.block_x != bx || r.block_y != by)
                    throw MalformedStream(StreamErrorKind::RecordOrder,
                                          "record " + std::to_string(i) + " at frame " +
                                              std::to_string(r.frame_index) + " (" + std::to_string(r.block_x) +
                                              "," + std::to_string(r.block_y) + ")");
                if (r.idx != 0 && r.idx != 1)
                    throw MalformedStream(StreamErrorKind::FieldRange,
                                          "record " + std::to_string(i) + " idx " + std::to_string(r.idx));
                if (!in_range(r.mvd))
                    throw MalformedStream(StreamErrorKind::FieldRange, "record " + std::to_string(i) + " mvd");
            }
        }
    }
}

// AMVP candidates of one PU: A is the left neighbour, B the above neighbour
// (zero vector when absent). When A == B, B is replaced by the co-located MV
// of the previous frame (zero when that frame is intra or absent).
inline CandidatePair derive_candidates(const MvField& field, int frame, int block_x, int block_y)
{
    const int pu = field.pu_size();
    if (frame < 0 || frame >= field.frames() || block_x < 0 || block_y < 0 || block_x % pu != 0 ||
        block_y % pu != 0 || block_x / pu >= field.cols() || block_y / pu >= field.rows())
        throw MalformedStream(StreamErrorKind::FieldRange,
                              "PU (" + std::to_string(block_x) + "," + std::to_string(block_y) + ") of frame " +
                                  std::to_string(frame) + " outside the grid");
    const int col = block_x / pu;
    const int row = block_y / pu;
    CandidatePair c;
    if (col > 0)
        c.mvp0 = field.at(frame, col - 1, row);
    if (row > 0)
        c.mvp1 = field.at(frame, col, row - 1);
    if (c.mvp0 == c.mvp1)
        c.mvp1 = frame >= 2 ? field.at(frame - 1, col, row) : MotionVector{};
    return c;
}

struct MvpChoice {
    int idx = 0;
    Mvd mvd;

    bool operator==(const MvpChoice&) const = default;
};

// Picks the predictor with the lower rate; an exact tie selects index 0.
inline MvpChoice select_mvp(const MotionVector& mv, const CandidatePair& cands)
{
    const Mvd d0 = mvd_of(mv, cands.mvp0);
    const Mvd d1 = mvd_of(mv, cands.mvp1);
    if (rate_of(d1) < rate_of(d0))
        return {1, d1};
    return {0, d0};
}

// Candidate that seeds the motion search: the one whose own vector is
// cheaper to code, index 0 on a tie.
inline const MotionVector& seed_candidate(const CandidatePair& cands)
{
    const int r0 = se_bits(cands.mvp0.x) + se_bits(cands.mvp0.y);
    const int r1 = se_bits(cands.mvp1.x) + se_bits(cands.mvp1.y);
    return r1 < r0 ? cands.mvp1 : cands.mvp0;
}

// Rate of signaling mv against whichever candidate is cheaper.
inline int best_candidate_rate(const MotionVector& mv, const CandidatePair& cands)
{
    const int r0 = rate_of(mvd_of(mv, cands.mvp0));
    const int r1 = rate_of(mvd_of(mv, cands.mvp1));
    return r0 < r1 ? r0 : r1;
}

struct MotionSearchResult {
    MotionVector mv;
    long long sad = 0;
    double cost = 0.0;
};

namespace detail {

constexpr int floor_div4(int v) noexcept
{
    return v >= 0 ? v / 4 : -((-v + 3) / 4);
}

constexpr int clamp_int(int v, int lo, int hi) noexcept
{
    return v < lo ? lo : (v > hi ? hi : v);
}

// SAD of the block at (bx,by) in cur against (bx+dx, by+dy) in ref. Stops
// early and returns a value above `limit` once the partial sum exceeds it.
inline long long block_sad(const Plane& cur, const Plane& ref, int bx, int by, int dx, int dy, int size,
                           long long limit)
{
    long long sad = 0;
    for (int y = 0; y < size; ++y) {
        const std::uint8_t* c = cur.row(by + y) + bx;
        const std::uint8_t* r = ref.row(by + dy + y) + bx + dx;
        int row_sad = 0;
        for (int x = 0; x < size; ++x) {
            const int diff = static_cast<int>(c[x]) - static_cast<int>(r[x]);
            row_sad += diff < 0 ? -diff : diff;
        }
        sad += row_sad;
        if (sad > limit)
            return sad;
    }
    return sad;
}

} // namespace detail

// Full search over [start/4 - range, start/4 + range] integer pels, clipped
// so the displaced block stays inside the reference and the MV stays in
// range. Minimizes SAD + lambda * rate against the cheaper candidate; ties
// go to smaller SAD, then smaller |dy|, then smaller |dx|, then raster order.
inline MotionSearchResult motion_estimate(const Plane& cur, int block_x, int block_y, const Plane& ref,
                                          const MotionVector& start, const CandidatePair& cands,
                                          const RdParams& params)
{
    const int size = params.pu_size;
    const int min_dx = std::max(-block_x, -(kMvMax / 4));
    const int max_dx = std::min(ref.width - size - block_x, kMvMax / 4);
    const int min_dy = std::max(-block_y, -(kMvMax / 4));
    const int max_dy = std::min(ref.height - size - block_y, kMvMax / 4);

    const int cx = detail::clamp_int(detail::floor_div4(start.x), min_dx, max_dx);
    const int cy = detail::clamp_int(detail::floor_div4(start.y), min_dy, max_dy);
    const int x0 = std::max(cx - params.search_range, min_dx);
    const int x1 = std::min(cx + params.search_range, max_dx);
    const int y0 = std::max(cy - params.search_range, min_dy);
    const int y1 = std::min(cy + params.search_range, max_dy);

    MotionSearchResult best;
    best.cost = std::numeric_limits<double>::infinity();
    best.sad = std::numeric_limits<long long>::max();
    for (int dy = y0; dy <= y1; ++dy) {
        for (int dx = x0; dx <= x1; ++dx) {
            const MotionVector mv{dx * 4, dy * 4};
            const double rate_cost = params.lambda_motion * best_candidate_rate(mv, cands);
            // Anything whose partial SAD pushes the cost strictly above the
            // best so far cannot win any tie-break.
            long long limit = std::numeric_limits<long long>::max();
            if (best.cost < std::numeric_limits<double>::infinity()) {
                const double slack = best.cost - rate_cost;
                limit = slack < 0.0 ? -1 : static_cast<long long>(slack) + 1;
            }
            const long long sad = detail::block_sad(cur, ref, block_x, block_y, dx, dy, size, limit);
            if (sad > limit)
                continue;
            const double cost = static_cast<double>(sad) + rate_cost;
            bool better = false;
            if (cost != best.cost)
                better = cost < best.cost;
            else if (sad != best.sad)
                better = sad < best.sad;
            else if (std::abs(dy) != std::abs(best.mv.y / 4))
                better = std::abs(dy) < std::abs(best.mv.y / 4);
            else if (std::abs(dx) != std::abs(best.mv.x / 4))
                better = std::abs(dx) < std::abs(best.mv.x / 4);
            if (better)
                best = {mv, sad, cost};
        }
    }
    return best;
}

struct EncodeResult {
    SequenceStream stream;
    MvField mv_field;
    // Candidate list used for each record, parallel to stream.records.
    std::vector<CandidatePair> candidates;
    std::uint64_t total_rate_bits = 0;
};

// Encodes frames[1..] as P-frames predicting from the previous
// reconstruction. Reconstruction is the motion-compensated copy; there is no
// residual.
inline EncodeResult encode_sequence(std::span<const Plane> frames, const RdParams& params)
{
    params.validate();
    if (frames.size() < 2)
        throw MalformedStream(StreamErrorKind::BadInput, "need at least 2 frames");
    const int w = frames[0].width;
    const int h = frames[0].height;
    for (const Plane& f : frames) {
        if (f.width != w || f.height != h || f.samples.size() != static_cast<std::size_t>(w) * h)
            throw MalformedStream(StreamErrorKind::BadInput, "frame size mismatch");
    }
    if (frames.size() > std::numeric_limits<std::uint32_t>::max())
        throw MalformedStream(StreamErrorKind::BadInput, "too many frames");

    EncodeResult out;
    StreamHeader& hdr = out.stream.header;
    hdr.width = w;
    hdr.height = h;
    hdr.pu_size = params.pu_size;
    hdr.qp = params.qp;
    hdr.gop = Gop::IPPP;
    hdr.frame_count = static_cast<std::uint32_t>(frames.size());
    try {
        validate_header(hdr);
    } catch (const MalformedStream& e) {
        throw MalformedStream(StreamErrorKind::BadInput, e.what());
    }

    const int pu = params.pu_size;
    out.mv_field = MvField(w, h, pu, static_cast<int>(frames.size()));
    out.stream.records.reserve(hdr.expected_records());
    out.candidates.reserve(hdr.expected_records());

    Plane recon = frames[0];
    for (std::size_t f = 1; f < frames.size(); ++f) {
        const int fi = static_cast<int>(f);
        Plane next(w, h);
        for (int by = 0; by < h; by += pu) {
            for (int bx = 0; bx < w; bx += pu) {
                const CandidatePair cands = derive_candidates(out.mv_field, fi, bx, by);
                const MotionSearchResult me =
                    motion_estimate(frames[f], bx, by, recon, seed_candidate(cands), cands, params);
                const MvpChoice choice = select_mvp(me.mv, cands);
                out.stream.records.push_back({static_cast<std::uint32_t>(f), bx, by, choice.idx, choice.mvd});
                out.candidates.push_back(cands);
                out.mv_field.at_pel(fi, bx, by) = me.mv;
                out.total_rate_bits += static_cast<std::uint64_t>(rate_of(choice.mvd));
                const int dx = me.mv.x / 4;
                const int dy = me.mv.y / 4;
                for (int y = 0; y < pu; ++y) {
                    const std::uint8_t* src = recon.row(by + dy + y) + bx + dx;
                    std::copy(src, src + pu, next.row(by + y) + bx);
                }
            }
        }
        recon = std::move(next);
    }
    return out;
}

// Codes a given motion field: for every inter PU in decode order, derive the
// candidates and select the cheaper predictor. Frame 0 of the field is
// ignored.
inline SequenceStream encode_motion_field(const StreamHeader& header, const MvField& field)
{
    validate_header(header);
    if (field.cols() != header.cols() || field.rows() != header.rows() ||
        field.frames() != static_cast<int>(header.frame_count) || field.pu_size() != header.pu_size)
        throw MalformedStream(StreamErrorKind::BadInput, "motion field does not match header");
    SequenceStream s;
    s.header = header;
    s.records.reserve(header.expected_records());
    for (int f = 1; f < static_cast<int>(header.frame_count); ++f) {
        for (int by = 0; by < header.height; by += header.pu_size) {
            for (int bx = 0; bx < header.width; bx += header.pu_size) {
                const MotionVector& mv = field.at_pel(f, bx, by);
                const MvpChoice c = select_mvp(mv, derive_candidates(field, f, bx, by));
                s.records.push_back({static_cast<std::uint32_t>(f), bx, by, c.idx, c.mvd});
            }
        }
    }
    return s;
}

struct DecodedStream {
    MvField mv_field;
    // Candidate list seen by the decoder for each record.
    std::vector<CandidatePair> candidates;
};

// Decode-side replay: mv = mvd + mvp_idx with candidates derived from the
// MVs reconstructed so far.
inline DecodedStream decode_stream(const SequenceStream& stream)
{
    validate_stream(stream);
    const StreamHeader& h = stream.header;
    DecodedStream out;
    out.mv_field = MvField(h.width, h.height, h.pu_size, static_cast<int>(h.frame_count));
    out.candidates.reserve(stream.records.size());
    for (const PuRecord& r : stream.records) {
        const int f = static_cast<int>(r.frame_index);
        const CandidatePair cands = derive_candidates(out.mv_field, f, r.block_x, r.block_y);
        const MotionVector& mvp = cands[r.idx];
        const long long x = static_cast<long long>(mvp.x) + r.mvd.dx;
        const long long y = static_cast<long long>(mvp.y) + r.mvd.dy;
        if (!mv_component_in_range(x) || !mv_component_in_range(y))
            throw MalformedStream(StreamErrorKind::MvOverflow,
                                  "PU (" + std::to_string(r.block_x) + "," + std::to_string(r.block_y) +
                                      ") of frame " + std::to_string(f));
        out.mv_field.at_pel(f, r.block_x, r.block_y) = {static_cast<int>(x), static_cast<int>(y)};
        out.candidates.push_back(cands);
    }
    return out;
}

inline MvField reconstruct_mvs(const SequenceStream& stream)
{
    return decode_stream(stream).mv_field;
}

} // namespace mvpo
