#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include "noembed/grid.hpp"
#include "noembed/ruled.hpp"

namespace noembed {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Writes via a temporary file in the same directory and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// Grid CSV: header `x,y,value`, one row per non-exterior node in row-major order, LF endings.
/// The lattice and mask go to `<path>.json` (mask run-length encoded).
void write_grid_csv(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_grid_csv(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Single JSON document with lattice, mask and the non-exterior values.
void write_grid_json(const std::filesystem::path& path, const ScalarField& f);
ScalarField read_grid_json(const std::filesystem::path& path);

/// Run-length encoding of the mask as [kind, count] pairs.
std::vector<std::pair<int, std::size_t>> encode_mask(const std::vector<NodeKind>& mask);
std::vector<NodeKind> decode_mask(const std::vector<std::pair<int, std::size_t>>& runs, std::size_t size);

struct SurfaceHeader {
    double tau{0.0}, eps{0.0};
    std::uint64_t seed{0};
    double t_min{0.0}, t_max{0.0};
};

/// Surface CSV of (t, s, x1, x2, x3) samples on the t x s grid with a JSON header at `<path>.json`.
void write_surface_csv(const std::filesystem::path& path, const RuledSurface& r, const SurfaceHeader& h, int t_samples = 31);

} // namespace noembed
