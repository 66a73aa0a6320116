#pragma once
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace noembed::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double grid_h{0.0};        // tail pentagon spacing; 0 = short side / 512
    double quad_tol{1e-10};
    int K_max{10};
    double N_first{1.0}, N_ratio{2.0};
    int N_count{80};
    double N_margin{1e-8};
    int delta_count{4};
    int tail_K{1};
    std::uint64_t seed{20240601};
    int n_max{0};              // 0: per-target default
    std::string out_dir{"out"};
    std::vector<double> annulus_eta{1.0};
    double ruled_tau{0.5};

    /// Throws ConfigError on any out-of-range value.
    void validate() const;
    /// Flat key = value listing in a fixed order (used in reports).
    std::vector<std::pair<std::string, std::string>> entries() const;
};

/// INI file with sections grid, quad, K, N, delta, tail, seeds, truncation, output, annulus, ruled.
/// Unknown keys are errors.
RunConfig load_config(const std::filesystem::path& path);
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

} // namespace noembed::cli
