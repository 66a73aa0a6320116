#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>

#include "noembed/io.hpp"

namespace noembed::cli {

namespace {

double as_double(const std::string& key, const std::string& v)
{
    try {
        return parse_double(v);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long as_int(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
}

} // namespace

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw)
{
    const std::string v = trim(raw);
    if (key == "grid.h") c.grid_h = as_double(key, v);
    else if (key == "quad.tol") c.quad_tol = as_double(key, v);
    else if (key == "K.max") c.K_max = static_cast<int>(as_int(key, v));
    else if (key == "N.first") c.N_first = as_double(key, v);
    else if (key == "N.ratio") c.N_ratio = as_double(key, v);
    else if (key == "N.count") c.N_count = static_cast<int>(as_int(key, v));
    else if (key == "N.margin") c.N_margin = as_double(key, v);
    else if (key == "delta.count") c.delta_count = static_cast<int>(as_int(key, v));
    else if (key == "tail.K") c.tail_K = static_cast<int>(as_int(key, v));
    else if (key == "seeds.seed") {
        const long long s = as_int(key, v);
        if (s < 0) throw ConfigError("seeds.seed: must be nonnegative");
        c.seed = static_cast<std::uint64_t>(s);
    } else if (key == "truncation.n_max") c.n_max = static_cast<int>(as_int(key, v));
    else if (key == "output.dir") c.out_dir = v;
    else if (key == "annulus.eta") {
        c.annulus_eta.clear();
        std::istringstream in(v);
        std::string item;
        while (std::getline(in, item, ',')) c.annulus_eta.push_back(as_double(key, trim(item)));
    } else if (key == "ruled.tau") c.ruled_tau = as_double(key, v);
    else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const
{
    auto tol = [](const char* k, double v) {
        if (!(v > 0.0 && v < 1.0)) throw ConfigError(std::string(k) + ": tolerance must lie in (0, 1)");
    };
    tol("quad.tol", quad_tol);
    tol("N.margin", N_margin);
    if (!(grid_h >= 0.0) || grid_h > 0.1) throw ConfigError("grid.h: must be 0 (default) or in (0, 0.1]");
    if (K_max < 1) throw ConfigError("K.max: must be at least 1");
    if (!(N_first > 0.0)) throw ConfigError("N.first: must be positive");
    if (!(N_ratio > 1.0)) throw ConfigError("N.ratio: must exceed 1");
    if (N_count < 1) throw ConfigError("N.count: schedule must be non-empty");
    if (delta_count < 1) throw ConfigError("delta.count: schedule must be non-empty");
    if (tail_K < 1 || tail_K > 3) throw ConfigError("tail.K: must lie in 1..3");
    if (n_max < 0 || n_max > 12) throw ConfigError("truncation.n_max: must lie in 0..12");
    if (out_dir.empty()) throw ConfigError("output.dir: must not be empty");
    if (annulus_eta.empty()) throw ConfigError("annulus.eta: needs at least one value");
    for (double e : annulus_eta)
        if (!(e > 0.0)) throw ConfigError("annulus.eta: values must be positive");
    if (!(ruled_tau > 0.0 && ruled_tau < 1.0)) throw ConfigError("ruled.tau: must lie in (0, 1)");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const
{
    std::string eta;
    for (std::size_t i = 0; i < annulus_eta.size(); ++i) eta += (i ? "," : "") + format_double(annulus_eta[i]);
    return {
        {"grid.h", format_double(grid_h)},
        {"quad.tol", format_double(quad_tol)},
        {"K.max", std::to_string(K_max)},
        {"N.first", format_double(N_first)},
        {"N.ratio", format_double(N_ratio)},
        {"N.count", std::to_string(N_count)},
        {"N.margin", format_double(N_margin)},
        {"delta.count", std::to_string(delta_count)},
        {"tail.K", std::to_string(tail_K)},
        {"seeds.seed", std::to_string(seed)},
        {"truncation.n_max", std::to_string(n_max)},
        {"annulus.eta", eta},
        {"ruled.tau", format_double(ruled_tau)},
    };
}

RunConfig load_config(const std::filesystem::path& path)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    RunConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) apply_setting(c, section + "." + key, value.get_value<std::string>());
    }
    return c;
}

} // namespace noembed::cli
