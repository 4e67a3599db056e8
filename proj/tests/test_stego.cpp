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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include <mvpo/analyzer.hpp>
#include <mvpo/codec.hpp>
#include <mvpo/stego.hpp>
#include <mvpo/synth.hpp>

#include "oracles.hpp"
#include "test_util.hpp"

using namespace mvpo;

namespace {

EncodeResult random_cover(std::uint64_t seed, int pu = 16)
{
    std::mt19937_64 rng(seed);
    SynthSpec s = testutil::random_synth(rng, pu);
    s.frame_count = 5;
    return encode_sequence(synthesize(s), RdParams::for_qp(25, 4, pu));
}

EmbedConfig tar1(double e, std::uint64_t seed = 0)
{
    EmbedConfig c;
    c.method = EmbedMethod::MvdParity;
    c.strength_e = e;
    c.rng_seed = seed;
    return c;
}

EmbedConfig tar2(int t, std::uint64_t seed = 0)
{
    EmbedConfig c;
    c.method = EmbedMethod::IndexThreshold;
    c.threshold_T = t;
    c.rng_seed = seed;
    return c;
}

EmbedConfig tar3(double bpap, std::uint64_t seed = 0)
{
    EmbedConfig c;
    c.method = EmbedMethod::IndexAdaptive;
    c.capacity_bpap = bpap;
    c.rng_seed = seed;
    return c;
}

SequenceStream zero_stream(int cols, int rows, std::uint32_t frames)
{
    const StreamHeader hd = testutil::header(cols * 16, rows * 16, 16, frames);
    return encode_motion_field(hd, MvField(hd.width, hd.height, 16, static_cast<int>(frames)));
}

} // namespace

TEST(MvdParity, ZeroStrengthIsIdentity)
{
    const EncodeResult enc = random_cover(1);
    const EmbedResult r = embed_mvd_parity(enc.stream, tar1(0.0, 42));
    EXPECT_EQ(r.stream, enc.stream);
    EXPECT_EQ(r.report.pus_modified, 0u);
    EXPECT_EQ(r.report.bits_embedded, 0u);
    EXPECT_EQ(r.report.pus_visited, enc.stream.records.size());
}

TEST(MvdParity, ParityAdjustTieGoesDown)
{
    EXPECT_EQ(parity_adjust({0, 0}, MvdComponent::Y, 1), (Mvd{0, -1}));
    EXPECT_EQ(parity_adjust({0, 0}, MvdComponent::Y, 0), (Mvd{0, 0}));
    EXPECT_EQ(parity_adjust({0, -1}, MvdComponent::Y, 1), (Mvd{0, -1}));
    // 2 -> 1 (3 bits) beats 2 -> 3 (5 bits).
    EXPECT_EQ(parity_adjust({2, 0}, MvdComponent::X, 1), (Mvd{1, 0}));
    // -2 -> -1 beats -2 -> -3.
    EXPECT_EQ(parity_adjust({-2, 5}, MvdComponent::X, 1), (Mvd{-1, 5}));
}

TEST(MvdParity, WorkedExampleShiftsMvByOneQuarterPel)
{
    const SequenceStream cover = testutil::predictor_example_stream();
    // Find a seed whose draw for the last PU picks the vertical component.
    std::uint64_t seed = 0;
    while (mvd_parity_selection(seed, 4, 1.0).component[3] != MvdComponent::Y)
        ++seed;
    EmbedConfig cfg = tar1(1.0, seed);
    cfg.payload = {0, 0, 0, 1};
    // Earlier PUs carry bit 0; make their own parities match so only the
    // last PU moves.
    const ParitySelection sel = mvd_parity_selection(seed, 4, 1.0);
    for (int i = 0; i < 3; ++i) {
        const Mvd d = cover.records[i].mvd;
        cfg.payload[i] = static_cast<std::uint8_t>((sel.component[i] == MvdComponent::X ? d.dx : d.dy) & 1);
    }
    const EmbedResult r = embed_mvd_parity(cover, cfg);
    EXPECT_EQ(r.report.pus_modified, 1u);
    EXPECT_EQ(r.stream.records[3].idx, 1);
    EXPECT_EQ(r.stream.records[3].mvd, (Mvd{0, -1}));
    EXPECT_EQ(reconstruct_mvs(r.stream).at(1, 1, 1), (MotionVector{3, 8}));
}

// Independent replay of the parity embedder on a stream: selection from
// the published draws, rewrite in decode order, rates from the EG0 oracle.
TEST(MvdParity, AllZeroStreamMatchesReplayOracle)
{
    const SequenceStream cover = zero_stream(10, 10, 2);
    ASSERT_EQ(cover.records.size(), 100u);
    EmbedConfig cfg = tar1(1.0, 2024);
    cfg.payload = {0, 1};

    const ParitySelection sel = mvd_parity_selection(cfg.rng_seed, 100, 1.0);
    MvField field(160, 160, 16, 2);
    std::set<std::size_t> expected_modified;
    std::vector<Mvd> expected_mvd(100);
    for (std::size_t i = 0; i < 100; ++i) {
        const PuRecord& r = cover.records[i];
        const CandidatePair c = derive_candidates(field, 1, r.block_x, r.block_y);
        MotionVector& mv = field.at_pel(1, r.block_x, r.block_y);
        Mvd d{mv.x - c[r.idx].x, mv.y - c[r.idx].y};
        const int bit = static_cast<int>(i % 2);
        int& comp = sel.component[i] == MvdComponent::X ? d.dx : d.dy;
        if ((comp & 1) != bit) {
            const int before = comp;
            comp = before - 1;
            const int down = oracle::plain_rate(d.dx, d.dy);
            comp = before + 1;
            const int up = oracle::plain_rate(d.dx, d.dy);
            comp = up < down ? before + 1 : before - 1;
            mv = {c[r.idx].x + d.dx, c[r.idx].y + d.dy};
            expected_modified.insert(i);
        }
        expected_mvd[i] = d;
    }

    const EmbedResult out = embed_mvd_parity(cover, cfg);
    EXPECT_EQ(out.report.pus_modified, expected_modified.size());
    EXPECT_EQ(out.report.bits_embedded, 100u);
    for (std::size_t i = 0; i < 100; ++i) {
        EXPECT_EQ(out.stream.records[i].mvd, expected_mvd[i]) << i;
        EXPECT_EQ(out.stream.records[i].idx, cover.records[i].idx);
    }
    // The first PU sees an untouched zero neighbourhood and carries bit 0.
    EXPECT_EQ(expected_modified.count(0), 0u);
    EXPECT_EQ(out.stream.records[0].mvd, (Mvd{0, 0}));
    EXPECT_EQ(reconstruct_mvs(out.stream), field);
}

TEST(MvdParity, MovesOnlyModifiedPusByOneQuarterPel)
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const EncodeResult enc = random_cover(100 + seed, seed % 2 ? 8 : 16);
        const EmbedResult r = embed_mvd_parity(enc.stream, tar1(0.1 * static_cast<double>(1 + seed % 9), seed));
        ASSERT_NO_THROW(validate_stream(r.stream));
        const MvField after = reconstruct_mvs(r.stream);
        std::uint64_t moved = 0;
        for (std::size_t i = 0; i < enc.stream.records.size(); ++i) {
            const PuRecord& rec = enc.stream.records[i];
            ASSERT_EQ(r.stream.records[i].idx, rec.idx);
            const int f = static_cast<int>(rec.frame_index);
            const MotionVector a = enc.mv_field.at_pel(f, rec.block_x, rec.block_y);
            const MotionVector b = after.at_pel(f, rec.block_x, rec.block_y);
            const int diff = std::abs(a.x - b.x) + std::abs(a.y - b.y);
            ASSERT_LE(diff, 1);
            moved += static_cast<std::uint64_t>(diff);
        }
        EXPECT_EQ(moved, r.report.pus_modified) << seed;
        EXPECT_GE(r.report.bits_embedded, r.report.pus_modified);
    }
}

TEST(MvdParity, SelectionIsNestedAcrossStrength)
{
    const ParitySelection lo = mvd_parity_selection(77, 5000, 0.2);
    const ParitySelection hi = mvd_parity_selection(77, 5000, 0.4);
    std::size_t n_lo = 0;
    std::size_t n_hi = 0;
    for (std::size_t i = 0; i < 5000; ++i) {
        if (lo.selected[i]) {
            EXPECT_TRUE(hi.selected[i]) << i;
        }
        EXPECT_EQ(lo.component[i], hi.component[i]);
        n_lo += lo.selected[i];
        n_hi += hi.selected[i];
    }
    EXPECT_NEAR(static_cast<double>(n_lo) / 5000.0, 0.2, 0.03);
    EXPECT_NEAR(static_cast<double>(n_hi) / 5000.0, 0.4, 0.03);
}

TEST(MvdParity, BrokenChosenCandidateIsDetected)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const EncodeResult enc = random_cover(300 + seed);
        const EmbedResult r = embed_mvd_parity(enc.stream, tar1(0.5, seed));
        const DecodedStream dec = decode_stream(r.stream);
        bool broken = false;
        for (std::size_t i = 0; i < r.stream.records.size(); ++i) {
            const PuRecord& rec = r.stream.records[i];
            const MotionVector& mv = dec.mv_field.at_pel(static_cast<int>(rec.frame_index), rec.block_x, rec.block_y);
            if (rate_of(mvd_of(mv, dec.candidates[i][rec.idx])) > rate_of(mvd_of(mv, dec.candidates[i][1 - rec.idx])))
                broken = true;
        }
        if (broken) {
            EXPECT_LT(optimal_rate(r.stream).n_optimal, optimal_rate(r.stream).n_pus);
        }
    }
}

TEST(IndexThreshold, MetricOfWorkedCandidates)
{
    EXPECT_EQ(threshold_metric({{3, 8}, {3, 9}}), 1);
    EXPECT_EQ(threshold_metric({{4, 0}, {-4, 0}}), 0);
    EXPECT_EQ(threshold_metric({{0, 0}, {8, -4}}), 12);
}

TEST(IndexThreshold, ZeroThresholdAdmitsOnlyIdenticalCandidates)
{
    EXPECT_TRUE(threshold_eligible({{4, 4}, {4, 4}}, 0));
    EXPECT_FALSE(threshold_eligible({{4, 0}, {-4, 0}}, 0));
    EXPECT_TRUE(threshold_eligible({{4, 0}, {-4, 0}}, 1));
    EXPECT_TRUE(threshold_eligible({{3, 8}, {3, 9}}, 1));
    EXPECT_FALSE(threshold_eligible({{3, 8}, {3, 9}}, 0));
}

TEST(IndexThreshold, WorkedFlipBreaksOptimality)
{
    const SequenceStream cover = testutil::predictor_example_stream();
    ASSERT_EQ(cover.records[3].idx, 1);
    EmbedConfig cfg = tar2(1);
    cfg.payload = {0};
    const EmbedResult r = embed_index_threshold(cover, cfg);
    EXPECT_EQ(r.report.pus_modified, 1u);
    EXPECT_EQ(r.report.bits_embedded, 4u);
    EXPECT_EQ(r.stream.records[3].idx, 0);
    EXPECT_EQ(r.stream.records[3].mvd, (Mvd{0, 1}));
    EXPECT_EQ(reconstruct_mvs(r.stream), reconstruct_mvs(cover));
    const FeatureReport rep = optimal_rate(r.stream);
    EXPECT_EQ(rep.verdict, Verdict::Stego);
    ASSERT_EQ(rep.violations.size(), 1u);
    EXPECT_EQ(rep.violations[0].block_x, 16);
    EXPECT_EQ(rep.violations[0].block_y, 16);
}

TEST(IndexThreshold, ZeroThresholdKeepsDetectorBlind)
{
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const EncodeResult enc = random_cover(500 + seed, seed % 2 ? 8 : 16);
        const EmbedResult r = embed_index_threshold(enc.stream, tar2(0, seed));
        EXPECT_EQ(r.report.rate_asymmetric_flips, 0u);
        const FeatureReport rep = optimal_rate(r.stream);
        EXPECT_EQ(rep.n_optimal, rep.n_pus) << seed;
    }
}

TEST(IndexEmbedders, PreserveMvFieldAndBreakAsymmetricPus)
{
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        const EncodeResult enc = random_cover(700 + seed, seed % 2 ? 8 : 16);
        for (const EmbedConfig& cfg : {tar2(static_cast<int>(seed * 7), seed), tar3(0.1 * static_cast<double>(seed % 6), seed)}) {
            const EmbedResult r = embed(enc.stream, cfg);
            ASSERT_NO_THROW(validate_stream(r.stream));
            const DecodedStream dec = decode_stream(r.stream);
            ASSERT_EQ(dec.mv_field, enc.mv_field);
            std::uint64_t flips = 0;
            std::uint64_t asym = 0;
            for (std::size_t i = 0; i < r.stream.records.size(); ++i) {
                const PuRecord& a = enc.stream.records[i];
                const PuRecord& b = r.stream.records[i];
                if (a.idx == b.idx) {
                    ASSERT_EQ(a.mvd, b.mvd);
                    continue;
                }
                ++flips;
                const MotionVector& mv = enc.mv_field.at_pel(static_cast<int>(a.frame_index), a.block_x, a.block_y);
                if (index_flip_cost(mv, dec.candidates[i]) != 0) {
                    ++asym;
                    EXPECT_FALSE(is_locally_optimal(b, dec.candidates[i], mv));
                }
            }
            EXPECT_EQ(flips, r.report.pus_modified);
            EXPECT_EQ(asym, r.report.rate_asymmetric_flips);
            EXPECT_GE(r.report.bits_embedded, r.report.pus_modified);
            const FeatureReport rep = optimal_rate(r.stream);
            EXPECT_EQ(rep.n_pus - rep.n_optimal, asym);
        }
    }
}

TEST(IndexAdaptive, TargetRounding)
{
    EXPECT_EQ(adaptive_target(0.3, 10), 3u);
    EXPECT_EQ(adaptive_target(0.1, 30), 3u);
    EXPECT_EQ(adaptive_target(0.25, 4), 1u);
    EXPECT_EQ(adaptive_target(0.26, 4), 2u);
    EXPECT_EQ(adaptive_target(0.0, 100), 0u);
    EXPECT_EQ(adaptive_target(0.5, 0), 0u);
}

TEST(IndexAdaptive, MatchingBitNeedsNoChange)
{
    const SequenceStream cover = zero_stream(2, 2, 2);
    EmbedConfig cfg = tar3(0.25);
    cfg.payload = {0};
    const EmbedResult r = embed_index_adaptive(cover, cfg);
    EXPECT_EQ(r.report.pus_modified, 0u);
    EXPECT_EQ(r.report.bits_embedded, 1u);
    EXPECT_EQ(r.stream, cover);
}

TEST(IndexAdaptive, ZeroCostPuChosenFirst)
{
    const SequenceStream cover = testutil::predictor_example_stream();
    // Costs: PUs 0-2 have identical candidates (cost 0), PU 3 costs 2.
    EmbedConfig cfg = tar3(0.75);
    cfg.payload = {1, 1, 1};
    const EmbedResult r = embed_index_adaptive(cover, cfg);
    EXPECT_EQ(r.report.pus_modified, 3u);
    EXPECT_EQ(r.report.rate_asymmetric_flips, 0u);
    EXPECT_EQ(r.stream.records[3], cover.records[3]);
    EXPECT_EQ(optimal_rate(r.stream).verdict, Verdict::Cover);
}

TEST(IndexAdaptive, HalfCapacityUsesTheFiveCheapest)
{
    // One PU per frame: candidates are {0, previous MV}. The seeded search
    // wants a strict gap between the 5th and 6th cheapest flip costs.
    const StreamHeader hd = testutil::header(16, 16, 16, 11);
    std::mt19937_64 rng(31);
    MvField field;
    std::vector<int> costs;
    for (int attempt = 0;; ++attempt) {
        field = MvField(16, 16, 16, 11);
        for (int f = 1; f <= 10; ++f)
            field.at(f, 0, 0) = {static_cast<int>(rng() % 401) - 200, static_cast<int>(rng() % 401) - 200};
        costs.clear();
        for (int f = 1; f <= 10; ++f) {
            const CandidatePair c = derive_candidates(field, f, 0, 0);
            const MotionVector mv = field.at(f, 0, 0);
            costs.push_back(std::abs(oracle::plain_rate(mv.x - c.mvp0.x, mv.y - c.mvp0.y) -
                                     oracle::plain_rate(mv.x - c.mvp1.x, mv.y - c.mvp1.y)));
        }
        std::vector<int> sorted = costs;
        std::sort(sorted.begin(), sorted.end());
        if (sorted[4] < sorted[5])
            break;
        ASSERT_LT(attempt, 100000);
    }
    const SequenceStream cover = encode_motion_field(hd, field);

    std::vector<std::size_t> order(10);
    for (std::size_t i = 0; i < 10; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    std::vector<std::size_t> cheapest(order.begin(), order.begin() + 5);
    std::sort(cheapest.begin(), cheapest.end());

    EmbedConfig cfg = tar3(0.5);
    for (std::size_t i : cheapest)
        cfg.payload.push_back(static_cast<std::uint8_t>(1 - cover.records[i].idx));
    const EmbedResult r = embed_index_adaptive(cover, cfg);
    EXPECT_EQ(r.report.bits_embedded, 5u);
    std::vector<std::size_t> changed;
    for (std::size_t i = 0; i < 10; ++i)
        if (r.stream.records[i].idx != cover.records[i].idx)
            changed.push_back(i);
    EXPECT_EQ(changed, cheapest);
}

TEST(IndexAdaptive, CapacityErrorReportsAchievable)
{
    const SequenceStream cover = zero_stream(2, 2, 3);
    try {
        embed_index_adaptive(cover, tar3(1.5));
        FAIL();
    } catch (const CapacityError& e) {
        EXPECT_DOUBLE_EQ(e.achievable_bpap(), 1.0);
    }
    EXPECT_NO_THROW(embed_index_adaptive(cover, tar3(1.0)));
}

TEST(Embedders, Deterministic)
{
    const EncodeResult enc = random_cover(9);
    for (const EmbedConfig& cfg : {tar1(0.3, 5), tar2(20, 5), tar3(0.4, 5)}) {
        const EmbedResult a = embed(enc.stream, cfg);
        const EmbedResult b = embed(enc.stream, cfg);
        EXPECT_EQ(a.stream, b.stream);
        EXPECT_EQ(a.report, b.report);
    }
}

TEST(Embedders, ConfigValidationAndDispatch)
{
    const SequenceStream cover = zero_stream(1, 1, 2);
    EXPECT_THROW(embed(cover, tar1(1.5)), UsageError);
    EXPECT_THROW(embed(cover, tar2(-1)), UsageError);
    EXPECT_THROW(embed(cover, tar3(-0.1)), UsageError);
    EXPECT_THROW(embed_index_threshold(cover, tar1(0.5)), UsageError);
    EmbedConfig bad = tar1(0.5);
    bad.payload = {2};
    EXPECT_THROW(embed(cover, bad), UsageError);
}
