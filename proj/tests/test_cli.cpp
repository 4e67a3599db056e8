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
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <json.hpp>

#include <mvpo/file_io.hpp>
#include <mvpo/stream_format.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("mvpo_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    // Runs the tool with stdout/stderr captured; returns its exit status.
    int run(const std::string& args)
    {
        const std::string cmd = std::string(MVPO_CLI_PATH) + " " + args + " > " + path("stdout").string() + " 2> " +
                                path("stderr").string();
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const std::string& name) const
    {
        const auto b = mvpo::read_file_bytes(path(name));
        return {b.begin(), b.end()};
    }

    nlohmann::json analyze(const std::string& stream)
    {
        EXPECT_EQ(run("analyze --in " + path(stream).string()), 0) << slurp("stderr");
        return nlohmann::json::parse(slurp("stdout"));
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
};

const std::string kMulti = "encode --synth multi --width 64 --height 64 --frames 6 --objects 3 --seed 7 --qp 25 ";

} // namespace

TEST_F(Cli, StaticSynthIsFullyOptimal)
{
    ASSERT_EQ(run("encode --synth global --amp 0 0 --width 64 --height 64 --frames 4 --out " + path("s.mvpo").string()),
              0)
        << slurp("stderr");
    EXPECT_NE(slurp("stdout").find("pus=48"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("s.mvpo.json")));
    const nlohmann::json j = analyze("s.mvpo");
    EXPECT_EQ(j["n_pus"], 48);
    EXPECT_EQ(j["optimal_rate_pct"], 100.0);
    EXPECT_EQ(j["verdict"], "cover");
}

TEST_F(Cli, EncodeIsDeterministic)
{
    ASSERT_EQ(run(kMulti + "--out " + path("a.mvpo").string()), 0);
    ASSERT_EQ(run(kMulti + "--out " + path("b.mvpo").string()), 0);
    EXPECT_EQ(mvpo::read_file_bytes(path("a.mvpo")), mvpo::read_file_bytes(path("b.mvpo")));
}

TEST_F(Cli, EncodeYuvInput)
{
    mvpo::write_file_atomic(path("in.yuv"), std::vector<std::uint8_t>(32 * 32 * 3 / 2 * 3, 90));
    ASSERT_EQ(run("encode --input " + path("in.yuv").string() + " --width 32 --height 32 --frames 3 --out " +
                  path("y.mvpo").string()),
              0)
        << slurp("stderr");
    EXPECT_EQ(fs::file_size(path("y.mvpo")), 25u + 8u * 16u);
    EXPECT_EQ(run("encode --input " + path("in.yuv").string() + " --width 32 --height 32 --frames 4 --out " +
                  path("z.mvpo").string()),
              2);
    EXPECT_FALSE(fs::exists(path("z.mvpo")));
}

TEST_F(Cli, MissingInputIsIoError)
{
    EXPECT_EQ(run("encode --input " + path("none.yuv").string() + " --width 64 --height 64 --frames 2 --out " +
                  path("x.mvpo").string()),
              2);
    EXPECT_FALSE(fs::exists(path("x.mvpo")));
    EXPECT_EQ(run("analyze --in " + path("none.mvpo").string()), 2);
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run("frobnicate"), 1);
    EXPECT_EQ(run("encode --synth global"), 1);
    EXPECT_EQ(run("encode --synth waves --out " + path("w.mvpo").string()), 1);
    ASSERT_EQ(run(kMulti + "--out " + path("c.mvpo").string()), 0);
    EXPECT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("s.mvpo").string() +
                  " --method tar1 --e 2"),
              1);
    EXPECT_EQ(run("analyze --in " + path("c.mvpo").string() + " --format xml"), 1);
}

TEST_F(Cli, MalformedStreamExitCode)
{
    mvpo::write_file_atomic(path("bad.mvpo"), std::string_view("MVPX0000000000000000000000000"));
    EXPECT_EQ(run("analyze --in " + path("bad.mvpo").string()), 3);
    EXPECT_NE(slurp("stderr").find("magic"), std::string::npos);
}

TEST_F(Cli, ThresholdZeroKeepsCover)
{
    ASSERT_EQ(run(kMulti + "--out " + path("c.mvpo").string()), 0);
    ASSERT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("s.mvpo").string() +
                  " --method tar2 --T 0 --seed 4"),
              0)
        << slurp("stderr");
    const nlohmann::json rep = nlohmann::json::parse(slurp("s.mvpo.embed.json"));
    EXPECT_EQ(rep["method"], "tar2");
    EXPECT_EQ(rep["rate_asymmetric_flips"], 0);
    EXPECT_EQ(analyze("s.mvpo")["optimal_rate_pct"], 100.0);
}

TEST_F(Cli, ParityEmbeddingIsDetected)
{
    ASSERT_EQ(run(kMulti + "--out " + path("c.mvpo").string()), 0);
    ASSERT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("s.mvpo").string() +
                  " --method tar1 --e 0.5 --seed 1"),
              0);
    EXPECT_LT(analyze("s.mvpo")["optimal_rate_pct"].get<double>(), 100.0);
    EXPECT_EQ(analyze("s.mvpo")["verdict"], "stego");

    ASSERT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("z.mvpo").string() +
                  " --method tar1 --e 0 --seed 1"),
              0);
    EXPECT_EQ(mvpo::read_file_bytes(path("z.mvpo")), mvpo::read_file_bytes(path("c.mvpo")));
}

TEST_F(Cli, EmbedConfigFileAndCapacity)
{
    ASSERT_EQ(run(kMulti + "--out " + path("c.mvpo").string()), 0);
    mvpo::write_file_atomic(path("embed.cfg"), std::string_view("method = tar3\nbpap = 0.25\nseed = 2\n"));
    ASSERT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("s.mvpo").string() + " --config " +
                  path("embed.cfg").string() + " --report " + path("r.json").string()),
              0)
        << slurp("stderr");
    const nlohmann::json rep = nlohmann::json::parse(slurp("r.json"));
    EXPECT_EQ(rep["method"], "tar3");
    EXPECT_EQ(rep["bits_embedded"], 20);
    EXPECT_EQ(rep["params"]["bpap"], 0.25);

    EXPECT_EQ(run("embed --in " + path("c.mvpo").string() + " --out " + path("t.mvpo").string() +
                  " --method tar3 --bpap 1.5"),
              4);
    EXPECT_FALSE(fs::exists(path("t.mvpo")));
}

TEST_F(Cli, EmptyStreamIsIndeterminate)
{
    // An encode needs two frames; a one-frame stream has a header only.
    EXPECT_EQ(run("encode --synth global --width 32 --height 32 --frames 1 --out " + path("e.mvpo").string()), 3);
    mvpo::SequenceStream empty;
    empty.header.width = 32;
    empty.header.height = 32;
    empty.header.frame_count = 1;
    mvpo::write_stream_file(path("e.mvpo"), empty);
    EXPECT_EQ(fs::file_size(path("e.mvpo")), 25u);
    EXPECT_EQ(run("analyze --in " + path("e.mvpo").string()), 0);
    EXPECT_EQ(nlohmann::json::parse(slurp("stdout"))["verdict"], "indeterminate");
    EXPECT_NE(slurp("stderr").find("indeterminate"), std::string::npos);
}

TEST_F(Cli, AnalyzeCsvToFile)
{
    ASSERT_EQ(run(kMulti + "--out " + path("c.mvpo").string()), 0);
    ASSERT_EQ(run("analyze --in " + path("c.mvpo").string() + " --format csv --out " + path("r.csv").string()), 0);
    const std::string csv = slurp("r.csv");
    EXPECT_EQ(csv.rfind("n_pus,n_optimal,optimal_rate_pct,verdict,source\n80,80,100.000000,cover,", 0), 0u) << csv;
}

TEST_F(Cli, ExperimentWritesResults)
{
    mvpo::write_file_atomic(path("plan.cfg"), std::string_view("synth_batch = count=3 width=32 height=32 frames=3\n"
                                                               "qp = 25\n"
                                                               "tar2_T = 0\n"));
    ASSERT_EQ(run("experiment --plan " + path("plan.cfg").string() + " --out " + path("res").string()), 0)
        << slurp("stderr");
    EXPECT_TRUE(fs::exists(path("res") / "results.csv"));
    EXPECT_TRUE(fs::exists(path("res") / "sequences.csv"));
    EXPECT_NE(slurp("stdout").find("tar2,0,25,3,0,100.000000,100.000000"), std::string::npos) << slurp("stdout");
}
