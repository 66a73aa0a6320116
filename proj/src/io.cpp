#include "noembed/io.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace noembed {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw FormatError("not a number: '" + s + "'");
    return v;
}

void write_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw FormatError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::pair<int, std::size_t>> encode_mask(const std::vector<NodeKind>& mask)
{
    std::vector<std::pair<int, std::size_t>> runs;
    for (NodeKind k : mask) {
        const int v = static_cast<int>(k);
        if (!runs.empty() && runs.back().first == v) ++runs.back().second;
        else runs.emplace_back(v, 1);
    }
    return runs;
}

std::vector<NodeKind> decode_mask(const std::vector<std::pair<int, std::size_t>>& runs, std::size_t size)
{
    std::vector<NodeKind> mask;
    mask.reserve(size);
    for (const auto& [v, n] : runs) {
        if (v < 0 || v > 2) throw FormatError("mask: unknown node kind " + std::to_string(v));
        if (mask.size() + n > size) throw FormatError("mask: runs exceed the lattice size");
        mask.insert(mask.end(), n, static_cast<NodeKind>(v));
    }
    if (mask.size() != size) throw FormatError("mask: runs do not cover the lattice");
    return mask;
}

namespace {

ordered_json lattice_json(const ScalarField& f)
{
    ordered_json j;
    j["origin"] = {f.spec.origin.x, f.spec.origin.y};
    j["h"] = f.spec.h;
    j["nx"] = f.spec.nx;
    j["ny"] = f.spec.ny;
    ordered_json runs = ordered_json::array();
    for (const auto& [v, n] : encode_mask(f.mask)) runs.push_back({v, n});
    j["mask_rle"] = runs;
    return j;
}

void read_lattice(const ordered_json& j, GridSpec& spec, std::vector<NodeKind>& mask)
{
    try {
        spec.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
        spec.h = j.at("h").get<double>();
        spec.nx = j.at("nx").get<int>();
        spec.ny = j.at("ny").get<int>();
        if (spec.nx < 1 || spec.ny < 1 || !(spec.h > 0.0)) throw FormatError("lattice: bad dimensions");
        std::vector<std::pair<int, std::size_t>> runs;
        for (const auto& r : j.at("mask_rle")) runs.emplace_back(r.at(0).get<int>(), r.at(1).get<std::size_t>());
        mask = decode_mask(runs, spec.size());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("lattice: ") + e.what());
    }
}

std::vector<NodeKind> mask_or_all(const ScalarField& f)
{
    return f.mask.empty() ? std::vector<NodeKind>(f.spec.size(), NodeKind::Interior) : f.mask;
}

} // namespace

fs::path sidecar_path(const fs::path& csv)
{
    fs::path p = csv;
    p += ".json";
    return p;
}

void write_grid_csv(const fs::path& path, const ScalarField& f)
{
    ScalarField g = f;
    g.mask = mask_or_all(f);
    std::string out = "x,y,value\n";
    for (std::size_t k = 0; k < g.spec.size(); ++k) {
        if (g.mask[k] == NodeKind::Exterior) continue;
        const Vec2 x = g.spec.node(k);
        out += format_double(x.x) + ',' + format_double(x.y) + ',' + format_double(g.values[k]) + '\n';
    }
    write_atomic(path, out);
    write_atomic(sidecar_path(path), lattice_json(g).dump(1) + "\n");
}

ScalarField read_grid_csv(const fs::path& path)
{
    const fs::path side = sidecar_path(path);
    if (!fs::exists(side)) throw FormatError("missing sidecar: expected " + side.string());
    GridSpec spec;
    std::vector<NodeKind> mask;
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(side));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(side.string() + ": " + e.what());
    }
    read_lattice(j, spec, mask);
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "x,y,value") throw FormatError(path.string() + ": expected header x,y,value");
    std::vector<double> values(spec.size(), 0.0);
    std::size_t row = 1;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (mask[k] == NodeKind::Exterior) continue;
        ++row;
        if (!std::getline(in, line)) throw FormatError(path.string() + ": fewer rows than non-exterior nodes");
        const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
            throw FormatError(path.string() + ": malformed row " + std::to_string(row));
        const Vec2 x = spec.node(k);
        const double px = parse_double(line.substr(0, c1)), py = parse_double(line.substr(c1 + 1, c2 - c1 - 1));
        if (std::abs(px - x.x) > 1e-9 * (1.0 + std::abs(x.x)) || std::abs(py - x.y) > 1e-9 * (1.0 + std::abs(x.y)))
            throw FormatError(path.string() + ": row " + std::to_string(row) + " does not match the lattice node");
        values[k] = parse_double(line.substr(c2 + 1));
    }
    if (std::getline(in, line) && !line.empty()) throw FormatError(path.string() + ": more rows than non-exterior nodes");
    return ScalarField(spec, std::move(mask), std::move(values));
}

void write_grid_json(const fs::path& path, const ScalarField& f)
{
    ScalarField g = f;
    g.mask = mask_or_all(f);
    ordered_json j = lattice_json(g);
    ordered_json vals = ordered_json::array();
    for (std::size_t k = 0; k < g.spec.size(); ++k)
        if (g.mask[k] != NodeKind::Exterior) vals.push_back(g.values[k]);
    j["values"] = std::move(vals);
    write_atomic(path, j.dump() + "\n");
}

ScalarField read_grid_json(const fs::path& path)
{
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    GridSpec spec;
    std::vector<NodeKind> mask;
    read_lattice(j, spec, mask);
    std::vector<double> values(spec.size(), 0.0);
    try {
        const auto& v = j.at("values");
        std::size_t n = 0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            if (mask[k] == NodeKind::Exterior) continue;
            if (n >= v.size()) throw FormatError(path.string() + ": fewer values than non-exterior nodes");
            values[k] = v.at(n++).get<double>();
        }
        if (n != v.size()) throw FormatError(path.string() + ": more values than non-exterior nodes");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return ScalarField(spec, std::move(mask), std::move(values));
}

void write_surface_csv(const fs::path& path, const RuledSurface& r, const SurfaceHeader& h, int t_samples)
{
    if (t_samples < 2) throw DomainError("write_surface_csv: need two t samples");
    std::string out = "t,s,x1,x2,x3\n";
    for (double s : r.s)
        for (int k = 0; k < t_samples; ++k) {
            const double t = h.t_min + (h.t_max - h.t_min) * k / (t_samples - 1);
            const Vec3 p = r.point(t, s);
            out += format_double(t) + ',' + format_double(s) + ',' + format_double(p.x()) + ',' + format_double(p.y())
                   + ',' + format_double(p.z()) + '\n';
        }
    ordered_json j;
    j["tau"] = h.tau;
    j["eps"] = h.eps;
    j["seed"] = h.seed;
    j["t_range"] = {h.t_min, h.t_max};
    j["s_range"] = {r.s_min(), r.s_max()};
    j["t_samples"] = t_samples;
    j["s_samples"] = r.s.size();
    write_atomic(path, out);
    write_atomic(sidecar_path(path), j.dump(1) + "\n");
}

} // namespace noembed
