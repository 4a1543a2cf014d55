#pragma once

#include <json.hpp>
#include <filesystem>
#include <string>
#include <vector>

#include "subriem/montecarlo.hpp"

namespace subriem::report {

using nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";

// Writes via a temp file + rename so readers never observe partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const json& doc);

std::string tail_curve_csv(const mc::TailCurve& curve);
json tail_curve_json(const mc::TailCurve& curve);

// Run manifest: enough to reproduce the run bit-exactly. Written atomically
// next to the outputs.
class RunManifest {
public:
    RunManifest(std::string command, json config);

    void add_output(const std::filesystem::path& p);
    void finish();  // records the end timestamp
    void write(const std::filesystem::path& path) const;

    const json& config() const { return config_; }

private:
    json doc_;
    json config_;
};

}  // namespace subriem::report
