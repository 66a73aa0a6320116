#pragma once
#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "noembed/log_scaled.hpp"

namespace noembed::cli {

using Json = nlohmann::ordered_json;

/// Number, or {sign, logmag} when the magnitude leaves double range.
Json to_json(const LogScaledReal& v);
/// Non-finite doubles become strings so the report stays valid JSON.
Json to_json(double v);

struct Check {
    std::string name;
    std::string anchor; // which claim of the construction the check exercises
    Json inputs = Json::object();
    Json values = Json::object();
    Json margins = Json::object();
    bool pass{false};
    double seconds{0.0};
};

class Report {
public:
    Report(std::string command, std::string target) : command_(std::move(command)), target_(std::move(target)) {}

    void set_config(Json cfg) { config_ = std::move(cfg); }
    Check& add(std::string name, std::string anchor);
    const std::vector<Check>& checks() const { return checks_; }
    bool all_pass() const;
    void add_runtime(const std::string& stage, double seconds) { stages_.push_back({stage, seconds}); }

    /// Deterministic part only.
    Json body() const;
    /// Body plus the runtime block.
    Json document(double total_seconds) const;

private:
    std::string command_, target_;
    Json config_ = Json::object();
    std::vector<Check> checks_;
    std::vector<std::pair<std::string, double>> stages_;
};

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

} // namespace noembed::cli
