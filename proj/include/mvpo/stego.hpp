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

// Message-embedding transforms over a coded stream:
//   MvdParity       - flips the LSB of one MVD component (moves the MV).
//   IndexThreshold  - writes payload bits into the predictor index of PUs
//                     whose candidates are close; the MV is kept.
//   IndexAdaptive   - writes payload bits into the indices of the PUs with
//                     the smallest rate penalty; the MV is kept.
// All three run on the decode side and replay candidate derivation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "codec.hpp"
#include "errors.hpp"
#include "mv_core.hpp"

namespace mvpo {

enum class EmbedMethod {
    MvdParity,
    IndexThreshold,
    IndexAdaptive,
};

inline const char* to_string(EmbedMethod m)
{
    switch (m) {
    case EmbedMethod::MvdParity: return "tar1";
    case EmbedMethod::IndexThreshold: return "tar2";
    case EmbedMethod::IndexAdaptive: return "tar3";
    }
    return "?";
}

struct EmbedConfig {
    EmbedMethod method = EmbedMethod::MvdParity;
    double strength_e = 0.0;   // MvdParity: per-PU selection probability
    int threshold_T = 0;       // IndexThreshold: quarter-pel units
    double capacity_bpap = 0.0; // IndexAdaptive: bits per AMVP PU
    std::uint64_t rng_seed = 0;
    // Explicit payload bits (0/1), reused cyclically. Empty means a
    // pseudo-random payload derived from rng_seed.
    std::vector<std::uint8_t> payload;

    void validate() const
    {
        switch (method) {
        case EmbedMethod::MvdParity:
            if (!(strength_e >= 0.0 && strength_e <= 1.0))
                throw UsageError("embedding strength e must be in [0,1]");
            break;
        case EmbedMethod::IndexThreshold:
            if (threshold_T < 0)
                throw UsageError("threshold T must be >= 0");
            break;
        case EmbedMethod::IndexAdaptive:
            if (!(capacity_bpap >= 0.0) || !std::isfinite(capacity_bpap))
                throw UsageError("bpap must be a non-negative number");
            break;
        }
        for (std::uint8_t b : payload)
            if (b > 1)
                throw UsageError("payload bits must be 0 or 1");
    }
};

struct FrameTally {
    std::uint32_t frame_index = 0;
    std::uint64_t pus_visited = 0;
    std::uint64_t pus_modified = 0;

    bool operator==(const FrameTally&) const = default;
};

struct PuLocation {
    std::uint32_t frame_index = 0;
    int block_x = 0;
    int block_y = 0;

    bool operator==(const PuLocation&) const = default;
};

struct EmbedReport {
    EmbedMethod method = EmbedMethod::MvdParity;
    std::uint64_t pus_visited = 0;
    std::uint64_t pus_modified = 0;
    std::uint64_t bits_embedded = 0;
    std::vector<FrameTally> per_frame;
    // PUs passed over because the rewritten syntax would leave the codec range.
    std::vector<PuLocation> skipped;
    // Index methods: modified PUs whose two candidates differ in rate.
    std::uint64_t rate_asymmetric_flips = 0;

    bool operator==(const EmbedReport&) const = default;
};

struct EmbedResult {
    SequenceStream stream;
    EmbedReport report;
};

// Bit k of the message. Explicit payloads repeat; the seeded default is an
// mt19937_64 stream expanded on demand.
class PayloadBits {
public:
    explicit PayloadBits(const EmbedConfig& cfg)
        : explicit_(cfg.payload), rng_(cfg.rng_seed ^ 0x9e3779b97f4a7c15ULL)
    {
    }

    int bit(std::uint64_t k)
    {
        if (!explicit_.empty())
            return explicit_[k % explicit_.size()];
        while (cache_.size() <= k) {
            std::uint64_t word = rng_();
            for (int i = 0; i < 64; ++i, word >>= 1)
                cache_.push_back(static_cast<std::uint8_t>(word & 1));
        }
        return cache_[k];
    }

private:
    std::vector<std::uint8_t> explicit_;
    std::mt19937_64 rng_;
    std::vector<std::uint8_t> cache_;
};

// Uniform double in [0,1) from the top 53 bits of a 64-bit draw.
inline double unit_interval(std::uint64_t draw)
{
    return static_cast<double>(draw >> 11) * 0x1.0p-53;
}

enum class MvdComponent { X, Y };

// Adjusts one component by +-1 so its LSB equals bit. Picks the direction
// with the lower resulting rate, -1 on a tie. Returns the input unchanged
// when the parity already matches.
inline Mvd parity_adjust(const Mvd& mvd, MvdComponent comp, int bit)
{
    const int v = comp == MvdComponent::X ? mvd.dx : mvd.dy;
    if ((v & 1) == bit)
        return mvd;
    Mvd down = mvd;
    Mvd up = mvd;
    if (comp == MvdComponent::X) {
        down.dx -= 1;
        up.dx += 1;
    } else {
        down.dy -= 1;
        up.dy += 1;
    }
    return rate_of(up) < rate_of(down) ? up : down;
}

// |(|H1| - |H0|)| + |(|V1| - |V0|)| over the two candidates.
inline int threshold_metric(const CandidatePair& c)
{
    return std::abs(std::abs(c.mvp1.x) - std::abs(c.mvp0.x)) + std::abs(std::abs(c.mvp1.y) - std::abs(c.mvp0.y));
}

// A zero threshold admits only identical candidates; mirrored pairs such as
// (4,0)/(-4,0) also score 0 on the metric but are not interchangeable.
inline bool threshold_eligible(const CandidatePair& c, int threshold_T)
{
    const int t = threshold_metric(c);
    if (threshold_T == 0)
        return c.identical();
    return t <= threshold_T;
}

// Rate penalty of swapping the predictor index of a PU coding mv.
inline int index_flip_cost(const MotionVector& mv, const CandidatePair& c)
{
    return std::abs(rate_of(mvd_of(mv, c.mvp0)) - rate_of(mvd_of(mv, c.mvp1)));
}

// Per-PU draws of the MVD parity embedder: whether the PU carries a bit and
// which component it would adjust. Two draws per PU are consumed whatever e
// is, so for one seed the selection at e is a subset of the selection at any
// larger e.
struct ParitySelection {
    std::vector<bool> selected;
    std::vector<MvdComponent> component;
};

inline ParitySelection mvd_parity_selection(std::uint64_t seed, std::size_t n_pus, double e)
{
    ParitySelection sel;
    sel.selected.reserve(n_pus);
    sel.component.reserve(n_pus);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < n_pus; ++i) {
        const double u = unit_interval(rng());
        sel.component.push_back((rng() >> 63) ? MvdComponent::Y : MvdComponent::X);
        sel.selected.push_back(u < e);
    }
    return sel;
}

namespace detail {

inline std::vector<FrameTally> empty_tallies(const StreamHeader& h)
{
    std::vector<FrameTally> t;
    for (std::uint32_t f = 1; f < h.frame_count; ++f)
        t.push_back({f, 0, 0});
    return t;
}

inline FrameTally& tally_for(std::vector<FrameTally>& t, std::uint32_t frame)
{
    return t[frame - 1];
}

} // namespace detail

// MVD parity embedding over the PUs picked by mvd_parity_selection. The
// payload bit of a PU is indexed by its decode position. Only the modified
// PUs' motion vectors move; the MVDs of all other PUs are rewritten against
// the updated candidates so their motion vectors and indices are preserved.
inline EmbedResult embed_mvd_parity(const SequenceStream& stream, const EmbedConfig& cfg)
{
    cfg.validate();
    if (cfg.method != EmbedMethod::MvdParity)
        throw UsageError("embed_mvd_parity needs method tar1");
    const DecodedStream decoded = decode_stream(stream);

    EmbedResult out;
    out.stream = stream;
    EmbedReport& rep = out.report;
    rep.method = cfg.method;
    rep.per_frame = detail::empty_tallies(stream.header);

    MvField target = decoded.mv_field;
    const ParitySelection sel = mvd_parity_selection(cfg.rng_seed, out.stream.records.size(), cfg.strength_e);
    PayloadBits payload(cfg);

    for (std::size_t i = 0; i < out.stream.records.size(); ++i) {
        PuRecord& r = out.stream.records[i];
        const int f = static_cast<int>(r.frame_index);
        const CandidatePair cands = derive_candidates(target, f, r.block_x, r.block_y);
        MotionVector& mv = target.at_pel(f, r.block_x, r.block_y);
        const MotionVector& mvp = cands[r.idx];
        r.mvd = mvd_of(mv, mvp);

        ++rep.pus_visited;
        FrameTally& tally = detail::tally_for(rep.per_frame, r.frame_index);
        ++tally.pus_visited;
        if (!sel.selected[i])
            continue;
        const MvdComponent comp = sel.component[i];

        const int bit = payload.bit(i);
        Mvd adjusted = parity_adjust(r.mvd, comp, bit);
        if (adjusted == r.mvd) {
            ++rep.bits_embedded;
            continue;
        }
        MotionVector moved{mvp.x + adjusted.dx, mvp.y + adjusted.dy};
        if (!in_range(moved)) {
            // Step the other way; the parity flips either way.
            const int step = comp == MvdComponent::X ? adjusted.dx - r.mvd.dx : adjusted.dy - r.mvd.dy;
            adjusted = r.mvd;
            (comp == MvdComponent::X ? adjusted.dx : adjusted.dy) -= step;
            moved = {mvp.x + adjusted.dx, mvp.y + adjusted.dy};
            if (!in_range(moved) || !in_range(adjusted)) {
                rep.skipped.push_back({r.frame_index, r.block_x, r.block_y});
                continue;
            }
        }
        r.mvd = adjusted;
        mv = moved;
        ++rep.bits_embedded;
        ++rep.pus_modified;
        ++tally.pus_modified;
    }
    return out;
}

namespace detail {

// Rewrites r to use predictor `bit` while keeping mv. Returns false when the
// new MVD leaves the codec range.
inline bool set_index_keep_mv(PuRecord& r, const MotionVector& mv, const CandidatePair& cands, int bit)
{
    const Mvd mvd = mvd_of(mv, cands[bit]);
    if (!in_range(mvd))
        return false;
    r.idx = bit;
    r.mvd = mvd;
    return true;
}

inline bool flip_in_range(const MotionVector& mv, const CandidatePair& cands)
{
    return in_range(mvd_of(mv, cands.mvp0)) && in_range(mvd_of(mv, cands.mvp1));
}

inline void count_index_change(EmbedReport& rep, FrameTally& tally, const MotionVector& mv,
                               const CandidatePair& cands)
{
    ++rep.pus_modified;
    ++tally.pus_modified;
    if (index_flip_cost(mv, cands) != 0)
        ++rep.rate_asymmetric_flips;
}

} // namespace detail

// Index embedding on PUs whose candidate threshold metric is within T.
inline EmbedResult embed_index_threshold(const SequenceStream& stream, const EmbedConfig& cfg)
{
    cfg.validate();
    if (cfg.method != EmbedMethod::IndexThreshold)
        throw UsageError("embed_index_threshold needs method tar2");
    const DecodedStream decoded = decode_stream(stream);

    EmbedResult out;
    out.stream = stream;
    EmbedReport& rep = out.report;
    rep.method = cfg.method;
    rep.per_frame = detail::empty_tallies(stream.header);
    PayloadBits payload(cfg);
    std::uint64_t next_bit = 0;

    for (std::size_t i = 0; i < out.stream.records.size(); ++i) {
        PuRecord& r = out.stream.records[i];
        const CandidatePair& cands = decoded.candidates[i];
        const MotionVector& mv = decoded.mv_field.at_pel(static_cast<int>(r.frame_index), r.block_x, r.block_y);
        FrameTally& tally = detail::tally_for(rep.per_frame, r.frame_index);
        ++rep.pus_visited;
        ++tally.pus_visited;
        if (!threshold_eligible(cands, cfg.threshold_T))
            continue;
        if (!detail::flip_in_range(mv, cands)) {
            rep.skipped.push_back({r.frame_index, r.block_x, r.block_y});
            continue;
        }
        const int bit = payload.bit(next_bit++);
        ++rep.bits_embedded;
        if (r.idx == bit)
            continue;
        detail::set_index_keep_mv(r, mv, cands, bit);
        detail::count_index_change(rep, tally, mv, cands);
    }
    return out;
}

// Number of PUs that must carry a bit: ceil(bpap * n), guarded against
// floating noise such as 0.3 * 10 = 3.0000000000000004.
inline std::uint64_t adaptive_target(double bpap, std::uint64_t n)
{
    const double exact = bpap * static_cast<double>(n);
    return static_cast<std::uint64_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

// Cost-ranked index embedding: the ceil(bpap * N) PUs with the smallest
// index-flip rate penalty (ties by decode order) carry one bit each, written
// in decode order.
inline EmbedResult embed_index_adaptive(const SequenceStream& stream, const EmbedConfig& cfg)
{
    cfg.validate();
    if (cfg.method != EmbedMethod::IndexAdaptive)
        throw UsageError("embed_index_adaptive needs method tar3");
    const DecodedStream decoded = decode_stream(stream);

    EmbedResult out;
    out.stream = stream;
    EmbedReport& rep = out.report;
    rep.method = cfg.method;
    rep.per_frame = detail::empty_tallies(stream.header);

    const std::size_t n = out.stream.records.size();
    std::vector<std::size_t> eligible;
    std::vector<int> cost(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const PuRecord& r = out.stream.records[i];
        const MotionVector& mv = decoded.mv_field.at_pel(static_cast<int>(r.frame_index), r.block_x, r.block_y);
        cost[i] = index_flip_cost(mv, decoded.candidates[i]);
        if (detail::flip_in_range(mv, decoded.candidates[i]))
            eligible.push_back(i);
        else
            rep.skipped.push_back({r.frame_index, r.block_x, r.block_y});
    }

    const std::uint64_t target = adaptive_target(cfg.capacity_bpap, n);
    if (target > eligible.size()) {
        const double achievable = n == 0 ? 0.0 : static_cast<double>(eligible.size()) / static_cast<double>(n);
        throw CapacityError("requested " + std::to_string(target) + " bits but only " +
                                std::to_string(eligible.size()) + " PUs are eligible (achievable bpap " +
                                std::to_string(achievable) + ")",
                            achievable);
    }
    std::stable_sort(eligible.begin(), eligible.end(),
                     [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
    std::vector<bool> chosen(n, false);
    for (std::uint64_t k = 0; k < target; ++k)
        chosen[eligible[k]] = true;

    PayloadBits payload(cfg);
    std::uint64_t next_bit = 0;
    for (std::size_t i = 0; i < n; ++i) {
        PuRecord& r = out.stream.records[i];
        FrameTally& tally = detail::tally_for(rep.per_frame, r.frame_index);
        ++rep.pus_visited;
        ++tally.pus_visited;
        if (!chosen[i])
            continue;
        const int bit = payload.bit(next_bit++);
        ++rep.bits_embedded;
        if (r.idx == bit)
            continue;
        const CandidatePair& cands = decoded.candidates[i];
        const MotionVector& mv = decoded.mv_field.at_pel(static_cast<int>(r.frame_index), r.block_x, r.block_y);
        detail::set_index_keep_mv(r, mv, cands, bit);
        detail::count_index_change(rep, tally, mv, cands);
    }
    return out;
}

inline EmbedResult embed(const SequenceStream& stream, const EmbedConfig& cfg)
{
    switch (cfg.method) {
    case EmbedMethod::MvdParity: return embed_mvd_parity(stream, cfg);
    case EmbedMethod::IndexThreshold: return embed_index_threshold(stream, cfg);
    case EmbedMethod::IndexAdaptive: return embed_index_adaptive(stream, cfg);
    }
    throw UsageError("unknown embedding method");
}

} // namespace mvpo
