#pragma once
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "config.hpp"
#include "noembed/mollify.hpp"
#include "report.hpp"

namespace noembed::cli {

inline constexpr int kPinnedMinK = 4; // high-precision oracle value of the minimal K for K.max >= 4

/// Lazily computed tail construction shared by the tail and corollary pipelines.
struct TailState {
    TailSolution sol;
    NSelection n_sel;
    std::vector<double> delta_schedule;
    std::optional<DeltaSelection> delta_sel;
    double h{0.0};
};

class Context {
public:
    explicit Context(RunConfig cfg) : cfg_(std::move(cfg)) {}
    const RunConfig& config() const { return cfg_; }
    TailState& tail(Report& rep);

private:
    RunConfig cfg_;
    std::unique_ptr<TailState> tail_;
};

void verify_moon(Context& ctx, Report& rep);
void verify_tail(Context& ctx, Report& rep);
void verify_corollary(Context& ctx, Report& rep);
void verify_g1(Context& ctx, Report& rep);
void verify_annulus(Context& ctx, Report& rep);
void verify_ruled(Context& ctx, Report& rep);

/// Runs a verify target ("all" runs every pipeline) and returns the report.
Report run_verify(const std::string& target, const RunConfig& cfg);
/// Builds the metric for a target, writes grids and a manifest; returns the manifest path.
std::filesystem::path run_assemble(const std::string& target, const RunConfig& cfg);

Json config_json(const RunConfig& cfg);

} // namespace noembed::cli
