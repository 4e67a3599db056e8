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

// mvpo: encode / embed / analyze / experiment front end.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <mvpo/mvpo.hpp>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CodingFlags {
    int qp = 25;
    int pu_size = 16;
    int search_range = 8;
    std::string gop = "IPPP";

    mvpo::RdParams params() const
    {
        if (gop != "IPPP")
            throw mvpo::UsageError("only the IPPP gop pattern is supported");
        return mvpo::RdParams::for_qp(qp, search_range, pu_size);
    }
};

void add_coding_flags(CLI::App* cmd, CodingFlags& f)
{
    cmd->add_option("--qp", f.qp, "Quantization parameter")->capture_default_str();
    cmd->add_option("--pu-size", f.pu_size, "PU size in pels (8, 16, 32, 64)")->capture_default_str();
    cmd->add_option("--search-range", f.search_range, "Integer-pel search range")->capture_default_str();
    cmd->add_option("--gop", f.gop, "GOP pattern")->capture_default_str();
}

struct EncodeArgs {
    CodingFlags coding;
    std::string input;
    std::string synth;
    int width = 0;
    int height = 0;
    std::uint32_t frames = 0;
    std::vector<int> amp{1, 0};
    int objects = 2;
    std::uint64_t seed = 0;
    std::string out;
};

int run_encode(const EncodeArgs& a)
{
    const mvpo::RdParams params = a.coding.params();
    std::vector<mvpo::Plane> frames;
    ordered_json source;
    if (!a.input.empty() == !a.synth.empty())
        throw mvpo::UsageError("give exactly one of --input or --synth");
    if (!a.input.empty()) {
        if (a.width <= 0 || a.height <= 0 || a.frames == 0)
            throw mvpo::UsageError("--input needs --width, --height and --frames");
        frames = mvpo::read_yuv(a.input, {a.width, a.height, a.frames});
        source = {{"yuv", a.input}, {"width", a.width}, {"height", a.height}, {"frames", a.frames}};
    } else {
        mvpo::SynthSpec s;
        s.pattern = mvpo::parse_synth_pattern(a.synth);
        s.seed = a.seed;
        s.width = a.width > 0 ? a.width : 64;
        s.height = a.height > 0 ? a.height : 64;
        s.frame_count = a.frames > 0 ? a.frames : 8;
        if (a.amp.size() != 2)
            throw mvpo::UsageError("--amp takes two values");
        s.amp_x = a.amp[0];
        s.amp_y = a.amp[1];
        s.object_count = a.objects;
        frames = mvpo::synthesize(s);
        source = {{"synth", mvpo::to_string(s.pattern)}, {"seed", s.seed},     {"width", s.width},
                  {"height", s.height},                  {"frames", s.frame_count}, {"amp", a.amp},
                  {"objects", s.object_count}};
    }
    const mvpo::EncodeResult enc = mvpo::encode_sequence(frames, params);
    mvpo::write_stream_file(a.out, enc.stream);

    ordered_json meta;
    meta["command"] = "encode";
    meta["source"] = source;
    meta["qp"] = params.qp;
    meta["lambda_motion"] = params.lambda_motion;
    meta["pu_size"] = params.pu_size;
    meta["search_range"] = params.search_range;
    meta["gop"] = a.coding.gop;
    meta["pus"] = enc.stream.records.size();
    meta["total_rate_bits"] = enc.total_rate_bits;
    mvpo::write_file_atomic(a.out + ".json", meta.dump(2) + "\n");

    std::cout << "pus=" << enc.stream.records.size() << " total_rate_bits=" << enc.total_rate_bits << "\n";
    return 0;
}

struct EmbedArgs {
    std::string in;
    std::string out;
    std::string report;
    std::string config;
    std::string method;
    double e = 0.0;
    int T = 0;
    double bpap = 0.0;
    std::uint64_t seed = 0;
    std::string payload;
};

mvpo::EmbedMethod parse_method(const std::string& m)
{
    if (m == "tar1")
        return mvpo::EmbedMethod::MvdParity;
    if (m == "tar2")
        return mvpo::EmbedMethod::IndexThreshold;
    if (m == "tar3")
        return mvpo::EmbedMethod::IndexAdaptive;
    throw mvpo::UsageError("--method must be tar1, tar2 or tar3");
}

std::vector<std::uint8_t> parse_payload(const std::string& bits)
{
    std::vector<std::uint8_t> out;
    for (char c : bits) {
        if (c != '0' && c != '1')
            throw mvpo::UsageError("--payload takes a string of 0/1 characters");
        out.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return out;
}

// Values from --config fill in every flag that was not given on the command
// line.
void apply_embed_config(CLI::App* cmd, EmbedArgs& a)
{
    if (a.config.empty())
        return;
    for (const auto& [key, value] : mvpo::read_config_file(a.config)) {
        auto unset = [&](const char* flag) { return cmd->get_option(flag)->count() == 0; };
        if (key == "method") {
            if (unset("--method"))
                a.method = value;
        } else if (key == "e") {
            if (unset("--e"))
                a.e = mvpo::parse_number<double>(value, key);
        } else if (key == "T") {
            if (unset("--T"))
                a.T = mvpo::parse_number<int>(value, key);
        } else if (key == "bpap") {
            if (unset("--bpap"))
                a.bpap = mvpo::parse_number<double>(value, key);
        } else if (key == "seed") {
            if (unset("--seed"))
                a.seed = mvpo::parse_number<std::uint64_t>(value, key);
        } else if (key == "payload") {
            if (unset("--payload"))
                a.payload = value;
        } else {
            throw mvpo::UsageError("unknown embed config key '" + key + "'");
        }
    }
}

int run_embed(CLI::App* cmd, EmbedArgs a)
{
    apply_embed_config(cmd, a);
    if (a.method.empty())
        throw mvpo::UsageError("--method is required (flag or config)");
    mvpo::EmbedConfig cfg;
    cfg.method = parse_method(a.method);
    cfg.strength_e = a.e;
    cfg.threshold_T = a.T;
    cfg.capacity_bpap = a.bpap;
    cfg.rng_seed = a.seed;
    cfg.payload = parse_payload(a.payload);
    cfg.validate();

    const mvpo::SequenceStream cover = mvpo::read_stream_file(a.in);
    const mvpo::EmbedResult res = mvpo::embed(cover, cfg);
    mvpo::write_stream_file(a.out, res.stream);

    ordered_json rep = mvpo::to_json(res.report, cfg);
    rep["input"] = a.in;
    rep["output"] = a.out;
    const std::string report_path = a.report.empty() ? a.out + ".embed.json" : a.report;
    mvpo::write_file_atomic(report_path, rep.dump(2) + "\n");
    std::cout << "visited=" << res.report.pus_visited << " modified=" << res.report.pus_modified
              << " bits=" << res.report.bits_embedded << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string in;
    std::string format = "json";
    std::string out;
};

int run_analyze(const AnalyzeArgs& a)
{
    const mvpo::SequenceStream s = mvpo::read_stream_file(a.in);
    const mvpo::FeatureReport rep = mvpo::optimal_rate(s);
    std::string text;
    if (a.format == "json") {
        ordered_json prov{{"command", "analyze"}, {"input", a.in}};
        text = mvpo::to_json(rep, prov).dump(2) + "\n";
    } else if (a.format == "csv") {
        text = mvpo::to_csv(rep, a.in);
    } else {
        throw mvpo::UsageError("--format must be json or csv");
    }
    if (a.out.empty())
        std::cout << text;
    else
        mvpo::write_file_atomic(a.out, text);
    if (rep.verdict == mvpo::Verdict::Indeterminate)
        std::cerr << "warning: stream has no AMVP PUs; verdict is indeterminate\n";
    return 0;
}

struct ExperimentArgs {
    std::string plan;
    std::string out;
    int jobs = 0;
};

int run_experiment_cmd(const ExperimentArgs& a)
{
    mvpo::ExperimentPlan plan = mvpo::parse_plan(mvpo::read_config_file(a.plan), fs::path(a.plan).parent_path());
    if (!a.out.empty())
        plan.output_dir = a.out;
    if (a.jobs > 0)
        plan.jobs = a.jobs;
    if (plan.output_dir.empty())
        throw mvpo::UsageError("experiment needs an output directory (--out or out= in the plan)");
    const mvpo::ExperimentResult res = mvpo::run_experiment(plan);
    mvpo::write_experiment(res, plan.output_dir);
    std::cout << mvpo::cells_csv(res);
    std::size_t failed = 0;
    for (const auto& c : res.cells)
        failed += c.n_failed;
    if (failed > 0)
        std::cerr << "warning: " << failed << " stream(s) failed; see sequences.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Motion-vector predictor optimality steganalysis toolkit"};
    app.require_subcommand(1);

    EncodeArgs enc;
    CLI::App* cmd_encode = app.add_subcommand("encode", "Encode a YUV file or synthetic sequence to a stream");
    add_coding_flags(cmd_encode, enc.coding);
    cmd_encode->add_option("--input", enc.input, "Raw YUV 4:2:0 input");
    cmd_encode->add_option("--synth", enc.synth, "Synthetic pattern: global, multi, noise");
    cmd_encode->add_option("--width", enc.width, "Frame width");
    cmd_encode->add_option("--height", enc.height, "Frame height");
    cmd_encode->add_option("--frames", enc.frames, "Frame count");
    cmd_encode->add_option("--amp", enc.amp, "Synthetic motion per frame (x y)")->expected(2);
    cmd_encode->add_option("--objects", enc.objects, "Object count for the multi pattern");
    cmd_encode->add_option("--seed", enc.seed, "Synthesis seed")->capture_default_str();
    cmd_encode->add_option("--out", enc.out, "Output stream file")->required();

    EmbedArgs emb;
    CLI::App* cmd_embed = app.add_subcommand("embed", "Embed a payload into a stream");
    cmd_embed->add_option("--in", emb.in, "Cover stream")->required();
    cmd_embed->add_option("--out", emb.out, "Stego stream")->required();
    cmd_embed->add_option("--report", emb.report, "Embed report path (default <out>.embed.json)");
    cmd_embed->add_option("--config", emb.config, "key=value config file");
    cmd_embed->add_option("--method", emb.method, "tar1, tar2 or tar3");
    cmd_embed->add_option("--e", emb.e, "tar1 embedding strength");
    cmd_embed->add_option("--T", emb.T, "tar2 threshold (quarter-pel)");
    cmd_embed->add_option("--bpap", emb.bpap, "tar3 bits per AMVP PU");
    cmd_embed->add_option("--seed", emb.seed, "Embedding seed");
    cmd_embed->add_option("--payload", emb.payload, "Explicit payload bits, e.g. 0110");

    AnalyzeArgs ana;
    CLI::App* cmd_analyze = app.add_subcommand("analyze", "Compute the optimal rate of MVP of a stream");
    cmd_analyze->add_option("--in", ana.in, "Stream file")->required();
    cmd_analyze->add_option("--format", ana.format, "json or csv")->capture_default_str();
    cmd_analyze->add_option("--out", ana.out, "Write the report here instead of stdout");

    ExperimentArgs exp;
    CLI::App* cmd_experiment = app.add_subcommand("experiment", "Run an experiment plan");
    cmd_experiment->add_option("--plan", exp.plan, "Plan file")->required();
    cmd_experiment->add_option("--out", exp.out, "Output directory");
    cmd_experiment->add_option("--jobs", exp.jobs, "Parallel jobs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(mvpo::ExitCode::Usage);
    }

    try {
        if (*cmd_encode)
            return run_encode(enc);
        if (*cmd_embed)
            return run_embed(cmd_embed, emb);
        if (*cmd_analyze)
            return run_analyze(ana);
        if (*cmd_experiment)
            return run_experiment_cmd(exp);
    } catch (const mvpo::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(mvpo::ExitCode::MalformedStream);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(mvpo::ExitCode::Usage);
    }
    return static_cast<int>(mvpo::ExitCode::Usage);
}
