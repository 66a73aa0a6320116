#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "config.hpp"
#include "noembed/io.hpp"
#include "pipelines.hpp"

using namespace noembed;
using namespace noembed::cli;

namespace {

int convert(const std::string& input, const std::string& format, const std::string& out)
{
    namespace fs = std::filesystem;
    const fs::path in(input);
    const std::string ext = in.extension().string();
    ScalarField f;
    if (ext == ".csv") f = read_grid_csv(in);
    else if (ext == ".json") f = read_grid_json(in);
    else throw FormatError("export: input must end in .csv or .json: " + input);
    fs::path target = out.empty() ? in : fs::path(out) / in.filename();
    target.replace_extension(format == "csv" ? ".csv" : ".json");
    if (fs::absolute(target) == fs::absolute(in)) throw FormatError("export: output would overwrite the input " + input);
    if (format == "csv") write_grid_csv(target, f);
    else write_grid_json(target, f);
    std::cout << target.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical verification of a non-embeddable metric construction"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    long long seed = -1;
    double grid_h = -1.0;
    int kmax = -1, nmax = -1;
    app.add_option("--config", config_path, "INI configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "base random seed");
    app.add_option("--grid-h", grid_h, "tail grid spacing (0 = default)");
    app.add_option("--kmax", kmax, "largest K in the minimal-K search");
    app.add_option("--nmax", nmax, "truncation index");

    std::string verify_target, assemble_target, export_input, export_format = "json";
    auto* verify = app.add_subcommand("verify", "run verification pipelines and write report.json");
    verify->add_option("target", verify_target, "moon, tail, corollary, g1, annulus, ruled or all")
        ->required()
        ->check(CLI::IsMember({"moon", "tail", "corollary", "g1", "annulus", "ruled", "all"}));
    auto* assemble = app.add_subcommand("assemble", "build a metric and write its grids and manifest");
    assemble->add_option("target", assemble_target, "gII, g1 or annulus")
        ->required()
        ->check(CLI::IsMember({"gII", "g1", "annulus"}));
    auto* exporter = app.add_subcommand("export", "convert a grid dump between csv and json");
    exporter->add_option("field", export_input, "grid file (.csv with sidecar, or .json)")->required();
    exporter->add_option("--format", export_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (exporter->parsed()) return convert(export_input, export_format, out_dir);

        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (grid_h >= 0.0) cfg.grid_h = grid_h;
        if (kmax >= 0) cfg.K_max = kmax;
        if (nmax >= 0) cfg.n_max = nmax;
        cfg.validate();

        Stopwatch sw;
        if (verify->parsed()) {
            const Report rep = run_verify(verify_target, cfg);
            const auto path = std::filesystem::path(cfg.out_dir) / "report.json";
            write_atomic(path, rep.document(sw.seconds()).dump(1) + "\n");
            for (const Check& c : rep.checks()) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
            std::cout << path.string() << "\n";
            return rep.all_pass() ? 0 : 1;
        }
        std::cout << run_assemble(assemble_target, cfg).string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
