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

// JSON and CSV renderings of analyzer and embedder reports. Field names are
// stable: n_pus, n_optimal, optimal_rate_pct, verdict.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "analyzer.hpp"
#include "stego.hpp"

namespace mvpo {

inline std::string format_pct(double pct)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", pct);
    return buf;
}

// `provenance` is copied verbatim under the "params" key.
inline nlohmann::ordered_json to_json(const FeatureReport& r,
                                      const nlohmann::ordered_json& provenance = nlohmann::ordered_json::object())
{
    nlohmann::ordered_json j;
    j["n_pus"] = r.n_pus;
    j["n_optimal"] = r.n_optimal;
    j["optimal_rate_pct"] = r.optimal_rate_pct;
    j["optimal_fraction"] = std::to_string(r.n_optimal) + "/" + std::to_string(r.n_pus);
    j["verdict"] = to_string(r.verdict);
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const FrameFeature& f : r.per_frame)
        frames.push_back({{"frame", f.frame_index}, {"n_pus", f.n_pus}, {"n_optimal", f.n_optimal}});
    j["per_frame"] = std::move(frames);
    nlohmann::ordered_json viol = nlohmann::ordered_json::array();
    for (const Violation& v : r.violations)
        viol.push_back({{"frame", v.frame_index},
                        {"x", v.block_x},
                        {"y", v.block_y},
                        {"idx", v.idx},
                        {"rate_chosen", v.rate_chosen},
                        {"rate_other", v.rate_other}});
    j["violations"] = std::move(viol);
    j["params"] = provenance;
    return j;
}

inline std::string to_csv(const FeatureReport& r, const std::string& source = "")
{
    std::string out = "n_pus,n_optimal,optimal_rate_pct,verdict,source\n";
    out += std::to_string(r.n_pus) + "," + std::to_string(r.n_optimal) + "," + format_pct(r.optimal_rate_pct) + "," +
           to_string(r.verdict) + "," + source + "\n";
    return out;
}

inline nlohmann::ordered_json to_json(const EmbedConfig& cfg)
{
    nlohmann::ordered_json j;
    j["method"] = to_string(cfg.method);
    switch (cfg.method) {
    case EmbedMethod::MvdParity: j["e"] = cfg.strength_e; break;
    case EmbedMethod::IndexThreshold: j["T"] = cfg.threshold_T; break;
    case EmbedMethod::IndexAdaptive: j["bpap"] = cfg.capacity_bpap; break;
    }
    j["seed"] = cfg.rng_seed;
    j["payload"] = cfg.payload.empty() ? "seeded" : "explicit";
    return j;
}

inline nlohmann::ordered_json to_json(const EmbedReport& r, const EmbedConfig& cfg)
{
    nlohmann::ordered_json j;
    j["method"] = to_string(r.method);
    j["pus_visited"] = r.pus_visited;
    j["pus_modified"] = r.pus_modified;
    j["bits_embedded"] = r.bits_embedded;
    j["rate_asymmetric_flips"] = r.rate_asymmetric_flips;
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const FrameTally& f : r.per_frame)
        frames.push_back({{"frame", f.frame_index}, {"pus_visited", f.pus_visited}, {"pus_modified", f.pus_modified}});
    j["per_frame"] = std::move(frames);
    nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
    for (const PuLocation& p : r.skipped)
        skipped.push_back({{"frame", p.frame_index}, {"x", p.block_x}, {"y", p.block_y}});
    j["skipped"] = std::move(skipped);
    j["params"] = to_json(cfg);
    return j;
}

} // namespace mvpo
