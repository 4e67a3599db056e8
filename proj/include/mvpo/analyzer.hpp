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

// Optimal rate of MVP: the share of AMVP PUs whose signaled predictor is not
// more expensive to code than the alternative candidate. An honest
// rate-driven encoder scores exactly 100%; any lower value marks the stream
// as stego.

#include <cstdint>
#include <vector>

#include "codec.hpp"
#include "mv_core.hpp"

namespace mvpo {

enum class Verdict {
    Cover,
    Stego,
    Indeterminate,
};

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::Cover: return "cover";
    case Verdict::Stego: return "stego";
    case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

struct FrameFeature {
    std::uint32_t frame_index = 0;
    std::uint64_t n_pus = 0;
    std::uint64_t n_optimal = 0;

    bool operator==(const FrameFeature&) const = default;
};

// A PU whose signaled predictor costs more bits than the other candidate.
struct Violation {
    std::uint32_t frame_index = 0;
    int block_x = 0;
    int block_y = 0;
    int idx = 0;
    int rate_chosen = 0;
    int rate_other = 0;

    bool operator==(const Violation&) const = default;
};

struct FeatureReport {
    std::uint64_t n_pus = 0;
    std::uint64_t n_optimal = 0;
    double optimal_rate_pct = 0.0;
    Verdict verdict = Verdict::Indeterminate;
    std::vector<FrameFeature> per_frame;
    std::vector<Violation> violations;

    bool operator==(const FeatureReport&) const = default;
};

// Rates of coding mv with either candidate.
struct PredictorRates {
    int rate0 = 0;
    int rate1 = 0;

    int operator[](int idx) const { return idx == 0 ? rate0 : rate1; }
};

inline PredictorRates predictor_rates(const MotionVector& mv, const CandidatePair& cands)
{
    return {rate_of(mvd_of(mv, cands.mvp0)), rate_of(mvd_of(mv, cands.mvp1))};
}

// R(mvp_idx) <= R(mvp_other). Distortion is the same for both candidates
// once mv is fixed, so D and lambda drop out of the comparison.
inline bool is_locally_optimal(const PuRecord& record, const CandidatePair& cands, const MotionVector& mv)
{
    const PredictorRates r = predictor_rates(mv, cands);
    return r[record.idx] <= r[1 - record.idx];
}

// Exact integer decision; no floating-point comparison.
inline Verdict classify(std::uint64_t n_pus, std::uint64_t n_optimal)
{
    if (n_pus == 0)
        return Verdict::Indeterminate;
    return n_optimal == n_pus ? Verdict::Cover : Verdict::Stego;
}

inline Verdict classify(const FeatureReport& report)
{
    return classify(report.n_pus, report.n_optimal);
}

// Single pass over the decoded stream. Throws MalformedStream on bad input.
inline FeatureReport optimal_rate(const SequenceStream& stream)
{
    const DecodedStream decoded = decode_stream(stream);
    FeatureReport rep;
    for (std::uint32_t f = 1; f < stream.header.frame_count; ++f)
        rep.per_frame.push_back({f, 0, 0});

    for (std::size_t i = 0; i < stream.records.size(); ++i) {
        const PuRecord& r = stream.records[i];
        const CandidatePair& cands = decoded.candidates[i];
        const MotionVector& mv = decoded.mv_field.at_pel(static_cast<int>(r.frame_index), r.block_x, r.block_y);
        FrameFeature& ff = rep.per_frame[r.frame_index - 1];
        ++rep.n_pus;
        ++ff.n_pus;
        if (is_locally_optimal(r, cands, mv)) {
            ++rep.n_optimal;
            ++ff.n_optimal;
        } else {
            const PredictorRates rates = predictor_rates(mv, cands);
            rep.violations.push_back({r.frame_index, r.block_x, r.block_y, r.idx, rates[r.idx], rates[1 - r.idx]});
        }
    }
    rep.optimal_rate_pct =
        rep.n_pus == 0 ? 0.0 : 100.0 * static_cast<double>(rep.n_optimal) / static_cast<double>(rep.n_pus);
    rep.verdict = classify(rep);
    return rep;
}

} // namespace mvpo
