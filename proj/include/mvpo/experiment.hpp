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

// Experiment driver: for every (sequence, qp) encode a cover stream, embed
// with every method parameter, analyze, and reduce to the two per-cell
// statistics: mean optimal rate across sequences and the share of
// sequences at exactly 100%.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <variant>
#include <vector>

#include "analyzer.hpp"
#include "codec.hpp"
#include "config.hpp"
#include "report_format.hpp"
#include "stego.hpp"
#include "synth.hpp"
#include "yuv_io.hpp"

namespace mvpo {

struct YuvSource {
    std::filesystem::path path;
    YuvSpec spec;
};

struct SequenceSource {
    std::string label;
    std::variant<SynthSpec, YuvSource> source;

    std::vector<Plane> load() const
    {
        if (const auto* s = std::get_if<SynthSpec>(&source))
            return synthesize(*s);
        const auto& y = std::get<YuvSource>(source);
        return read_yuv(y.path, y.spec);
    }
};

struct ExperimentPlan {
    std::vector<SequenceSource> sequences;
    std::vector<int> qps;
    std::vector<double> tar1_e;
    std::vector<int> tar2_T;
    std::vector<double> tar3_bpap;
    int pu_size = 16;
    int search_range = 8;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    int jobs = 1;

    void validate() const
    {
        if (sequences.empty())
            throw UsageError("experiment plan has no sequences");
        if (qps.empty())
            throw UsageError("experiment plan has no qp values");
        for (int qp : qps)
            RdParams::for_qp(qp, search_range, pu_size);
        if (jobs < 1)
            throw UsageError("jobs must be >= 1");
    }
};

namespace detail {

inline SynthSpec parse_synth_fields(const std::vector<std::string>& fields, std::string& label)
{
    SynthSpec s;
    for (const std::string& f : fields) {
        const auto eq = f.find('=');
        if (eq == std::string::npos)
            throw UsageError("sequence field '" + f + "' is not key=value");
        const std::string k = f.substr(0, eq);
        const std::string v = f.substr(eq + 1);
        if (k == "pattern")
            s.pattern = parse_synth_pattern(v);
        else if (k == "seed")
            s.seed = parse_number<std::uint64_t>(v, k);
        else if (k == "width")
            s.width = parse_number<int>(v, k);
        else if (k == "height")
            s.height = parse_number<int>(v, k);
        else if (k == "frames")
            s.frame_count = parse_number<std::uint32_t>(v, k);
        else if (k == "objects")
            s.object_count = parse_number<int>(v, k);
        else if (k == "amp") {
            const auto a = parse_number_list<int>(v, k);
            if (a.size() != 2)
                throw UsageError("amp needs two values, e.g. amp=1,0");
            s.amp_x = a[0];
            s.amp_y = a[1];
        } else if (k == "label")
            label = v;
        else
            throw UsageError("unknown synth field '" + k + "'");
    }
    s.validate();
    if (label.empty())
        label = std::string(to_string(s.pattern)) + "-" + std::to_string(s.seed);
    return s;
}

inline SequenceSource parse_sequence(const std::string& value, const std::filesystem::path& base)
{
    std::vector<std::string> fields = split(value, ' ');
    if (fields.empty())
        throw UsageError("empty sequence entry");
    const std::string kind = fields.front();
    fields.erase(fields.begin());
    SequenceSource src;
    if (kind == "synth") {
        src.source = parse_synth_fields(fields, src.label);
        return src;
    }
    if (kind == "yuv") {
        YuvSource y;
        for (const std::string& f : fields) {
            const auto eq = f.find('=');
            if (eq == std::string::npos)
                throw UsageError("sequence field '" + f + "' is not key=value");
            const std::string k = f.substr(0, eq);
            const std::string v = f.substr(eq + 1);
            if (k == "path")
                y.path = std::filesystem::path(v).is_absolute() ? std::filesystem::path(v) : base / v;
            else if (k == "width")
                y.spec.width = parse_number<int>(v, k);
            else if (k == "height")
                y.spec.height = parse_number<int>(v, k);
            else if (k == "frames")
                y.spec.frame_count = parse_number<std::uint32_t>(v, k);
            else if (k == "label")
                src.label = v;
            else
                throw UsageError("unknown yuv field '" + k + "'");
        }
        if (y.path.empty())
            throw UsageError("yuv sequence needs path=");
        if (src.label.empty())
            src.label = y.path.filename().string();
        src.source = y;
        return src;
    }
    throw UsageError("sequence kind must be 'synth' or 'yuv', got '" + kind + "'");
}

// synth_batch = count=N [patterns=a,b,..] [width= height= frames= seed=]:
// N sequences cycling through the patterns (default global,multi,noise)
// with consecutive seeds.
inline std::vector<SequenceSource> parse_synth_batch(const std::string& value)
{
    int count = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> patterns{"global", "multi", "noise"};
    std::vector<std::string> common;
    for (const std::string& f : split(value, ' ')) {
        if (f.rfind("count=", 0) == 0)
            count = parse_number<int>(f.substr(6), "count");
        else if (f.rfind("seed=", 0) == 0)
            seed = parse_number<std::uint64_t>(f.substr(5), "seed");
        else if (f.rfind("patterns=", 0) == 0)
            patterns = split(f.substr(9), ',');
        else
            common.push_back(f);
    }
    if (count <= 0)
        throw UsageError("synth_batch needs count=N with N > 0");
    if (patterns.empty())
        throw UsageError("synth_batch patterns= is empty");
    std::vector<SequenceSource> out;
    for (int i = 0; i < count; ++i) {
        std::vector<std::string> fields = common;
        fields.push_back("pattern=" + patterns[static_cast<std::size_t>(i) % patterns.size()]);
        fields.push_back("seed=" + std::to_string(seed + static_cast<std::uint64_t>(i)));
        // Vary the global pan so the batch is not one motion repeated.
        fields.push_back("amp=" + std::to_string(1 + i % 3) + "," + std::to_string(i % 2 == 0 ? 0 : -1));
        SequenceSource src;
        src.source = parse_synth_fields(fields, src.label);
        out.push_back(std::move(src));
    }
    return out;
}

} // namespace detail

inline ExperimentPlan parse_plan(const ConfigEntries& entries, const std::filesystem::path& base = {})
{
    ExperimentPlan plan;
    for (const auto& [key, value] : entries) {
        if (key == "sequence")
            plan.sequences.push_back(detail::parse_sequence(value, base));
        else if (key == "synth_batch") {
            auto batch = detail::parse_synth_batch(value);
            plan.sequences.insert(plan.sequences.end(), batch.begin(), batch.end());
        } else if (key == "qp")
            plan.qps = parse_number_list<int>(value, key);
        else if (key == "tar1_e" || key == "e")
            plan.tar1_e = parse_number_list<double>(value, key);
        else if (key == "tar2_T" || key == "T")
            plan.tar2_T = parse_number_list<int>(value, key);
        else if (key == "tar3_bpap" || key == "bpap")
            plan.tar3_bpap = parse_number_list<double>(value, key);
        else if (key == "pu_size")
            plan.pu_size = parse_number<int>(value, key);
        else if (key == "search_range")
            plan.search_range = parse_number<int>(value, key);
        else if (key == "seed")
            plan.seed = parse_number<std::uint64_t>(value, key);
        else if (key == "out")
            plan.output_dir = value;
        else if (key == "jobs")
            plan.jobs = parse_number<int>(value, key);
        else
            throw UsageError("unknown plan key '" + key + "'");
    }
    plan.validate();
    return plan;
}

// One analyzed stream: a sequence at a qp, either the cover or one stego
// variant.
struct SequenceRow {
    std::string method; // cover, tar1, tar2, tar3
    double parameter = 0.0;
    int qp = 0;
    std::size_t sequence = 0;
    std::string label;
    bool ok = false;
    std::string error;
    std::uint64_t n_pus = 0;
    std::uint64_t n_optimal = 0;
    double optimal_rate_pct = 0.0;
    std::uint64_t pus_modified = 0;
    std::uint64_t rate_asymmetric_flips = 0;
};

struct CellResult {
    std::string method;
    double parameter = 0.0;
    int qp = 0;
    std::size_t n_sequences = 0;
    std::size_t n_failed = 0;
    double mean_optimal_rate_pct = 0.0;
    double proportion_at_100_pct = 0.0;
    std::string first_error;
};

struct ExperimentResult {
    std::vector<CellResult> cells;
    std::vector<SequenceRow> rows;
    std::uint64_t seed = 0;
};

inline int method_rank(const std::string& m)
{
    if (m == "cover")
        return 0;
    if (m == "tar1")
        return 1;
    if (m == "tar2")
        return 2;
    return 3;
}

// Embedding seed for one sequence; independent of the method parameter so
// that tar1 selections are nested across e.
inline std::uint64_t sequence_seed(std::uint64_t plan_seed, std::size_t sequence)
{
    return plan_seed * 0x100000001b3ULL + static_cast<std::uint64_t>(sequence);
}

namespace detail {

inline std::vector<SequenceRow> run_job(const ExperimentPlan& plan, std::size_t seq, int qp)
{
    std::vector<SequenceRow> rows;
    const std::string& label = plan.sequences[seq].label;
    auto row_for = [&](const std::string& method, double param) {
        SequenceRow r;
        r.method = method;
        r.parameter = param;
        r.qp = qp;
        r.sequence = seq;
        r.label = label;
        return r;
    };
    std::vector<std::pair<EmbedConfig, double>> variants;
    for (double e : plan.tar1_e) {
        EmbedConfig c;
        c.method = EmbedMethod::MvdParity;
        c.strength_e = e;
        variants.emplace_back(c, e);
    }
    for (int t : plan.tar2_T) {
        EmbedConfig c;
        c.method = EmbedMethod::IndexThreshold;
        c.threshold_T = t;
        variants.emplace_back(c, static_cast<double>(t));
    }
    for (double b : plan.tar3_bpap) {
        EmbedConfig c;
        c.method = EmbedMethod::IndexAdaptive;
        c.capacity_bpap = b;
        variants.emplace_back(c, b);
    }

    SequenceStream cover;
    try {
        const std::vector<Plane> frames = plan.sequences[seq].load();
        cover = encode_sequence(frames, RdParams::for_qp(qp, plan.search_range, plan.pu_size)).stream;
    } catch (const std::exception& e) {
        SequenceRow r = row_for("cover", 0.0);
        r.error = e.what();
        rows.push_back(r);
        for (const auto& [cfg, param] : variants) {
            SequenceRow v = row_for(to_string(cfg.method), param);
            v.error = std::string("cover encode failed: ") + e.what();
            rows.push_back(v);
        }
        return rows;
    }

    auto fill = [](SequenceRow& r, const FeatureReport& rep) {
        r.ok = true;
        r.n_pus = rep.n_pus;
        r.n_optimal = rep.n_optimal;
        r.optimal_rate_pct = rep.optimal_rate_pct;
    };
    {
        SequenceRow r = row_for("cover", 0.0);
        try {
            fill(r, optimal_rate(cover));
        } catch (const std::exception& e) {
            r.error = e.what();
        }
        rows.push_back(r);
    }
    for (auto [cfg, param] : variants) {
        SequenceRow r = row_for(to_string(cfg.method), param);
        try {
            cfg.rng_seed = sequence_seed(plan.seed, seq);
            const EmbedResult stego = embed(cover, cfg);
            fill(r, optimal_rate(stego.stream));
            r.pus_modified = stego.report.pus_modified;
            r.rate_asymmetric_flips = stego.report.rate_asymmetric_flips;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
        rows.push_back(r);
    }
    return rows;
}

} // namespace detail

inline std::vector<CellResult> reduce_cells(const std::vector<SequenceRow>& rows)
{
    using Key = std::tuple<int, double, int>;
    std::map<Key, CellResult> cells;
    std::map<Key, std::size_t> at_100;
    for (const SequenceRow& r : rows) {
        const Key key{method_rank(r.method), r.parameter, r.qp};
        CellResult& c = cells[key];
        c.method = r.method;
        c.parameter = r.parameter;
        c.qp = r.qp;
        if (!r.ok) {
            ++c.n_failed;
            if (c.first_error.empty())
                c.first_error = r.error;
            continue;
        }
        ++c.n_sequences;
        c.mean_optimal_rate_pct += r.optimal_rate_pct;
        if (classify(r.n_pus, r.n_optimal) == Verdict::Cover)
            ++at_100[key];
    }
    std::vector<CellResult> out;
    for (auto& [key, c] : cells) {
        if (c.n_sequences > 0) {
            c.mean_optimal_rate_pct /= static_cast<double>(c.n_sequences);
            c.proportion_at_100_pct = 100.0 * static_cast<double>(at_100[key]) / static_cast<double>(c.n_sequences);
        }
        out.push_back(c);
    }
    return out;
}

// Jobs are (sequence, qp) pairs run on up to plan.jobs threads. Output is
// sorted, so the result does not depend on scheduling.
inline ExperimentResult run_experiment(const ExperimentPlan& plan)
{
    plan.validate();
    std::vector<std::pair<std::size_t, int>> jobs;
    for (std::size_t s = 0; s < plan.sequences.size(); ++s)
        for (int qp : plan.qps)
            jobs.emplace_back(s, qp);

    std::vector<std::vector<SequenceRow>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++)
            results[j] = detail::run_job(plan, jobs[j].first, jobs[j].second);
    };
    const int n_threads = std::min<int>(plan.jobs, static_cast<int>(jobs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
    }

    ExperimentResult out;
    out.seed = plan.seed;
    for (auto& r : results)
        out.rows.insert(out.rows.end(), r.begin(), r.end());
    std::sort(out.rows.begin(), out.rows.end(), [](const SequenceRow& a, const SequenceRow& b) {
        return std::make_tuple(method_rank(a.method), a.parameter, a.qp, a.sequence) <
               std::make_tuple(method_rank(b.method), b.parameter, b.qp, b.sequence);
    });
    out.cells = reduce_cells(out.rows);
    return out;
}

inline std::string format_parameter(double p)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

inline std::string cells_csv(const ExperimentResult& r)
{
    std::string out =
        "method,parameter,qp,n_sequences,n_failed,mean_optimal_rate_pct,proportion_at_100_pct,seed,first_error\n";
    for (const CellResult& c : r.cells) {
        std::string err = c.first_error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += c.method + "," + format_parameter(c.parameter) + "," + std::to_string(c.qp) + "," +
               std::to_string(c.n_sequences) + "," + std::to_string(c.n_failed) + "," +
               format_pct(c.mean_optimal_rate_pct) + "," + format_pct(c.proportion_at_100_pct) + "," +
               std::to_string(r.seed) + "," + err + "\n";
    }
    return out;
}

inline std::string rows_csv(const ExperimentResult& r)
{
    std::string out = "method,parameter,qp,sequence,label,n_pus,n_optimal,optimal_rate_pct,verdict,pus_modified,"
                      "rate_asymmetric_flips,seed,error\n";
    for (const SequenceRow& row : r.rows) {
        std::string err = row.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out += row.method + "," + format_parameter(row.parameter) + "," + std::to_string(row.qp) + "," +
               std::to_string(row.sequence) + "," + row.label + "," + std::to_string(row.n_pus) + "," +
               std::to_string(row.n_optimal) + "," + format_pct(row.optimal_rate_pct) + "," +
               (row.ok ? to_string(classify(row.n_pus, row.n_optimal)) : "error") + "," +
               std::to_string(row.pus_modified) + "," + std::to_string(row.rate_asymmetric_flips) + "," +
               std::to_string(r.seed) + "," + err + "\n";
    }
    return out;
}

// Writes results.csv (one row per cell) and sequences.csv (one row per
// analyzed stream) into dir.
inline void write_experiment(const ExperimentResult& r, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string());
    write_file_atomic(dir / "results.csv", cells_csv(r));
    write_file_atomic(dir / "sequences.csv", rows_csv(r));
}

} // namespace mvpo
