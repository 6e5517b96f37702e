// slitlab command-line front end.
//
//   slitlab <command> --config <file> [--out <dir>] [--seed <u64>] [--format csv,json,svg]
//
// Exit codes: 0 success, 1 validation error, 2 pipeline error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "slitlab/config.hpp"
#include "slitlab/errors.hpp"
#include "slitlab/run.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_pipeline = 2;

std::vector<std::string> split_formats(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace slitlab;

    CLI::App app{"slitlab: single-slit matter-wave diffraction workbench"};
    app.set_version_flag("--version", std::string(cli::tool_version));
    std::string command, config_path, out_dir, formats;
    std::uint64_t seed = 0;
    app.add_option("command", command,
                   "simulate | buildup | sweep-xb | onset | feasibility | compare")
        ->required();
    app.add_option("--config", config_path, "run configuration (TOML subset)")->required();
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    // config integers are signed 64-bit, so seeds stop at 2^63 - 1
    auto* seed_opt = app.add_option("--seed", seed, "sampling seed")
                         ->check(CLI::Range(std::uint64_t{0},
                                            std::uint64_t{std::numeric_limits<std::int64_t>::max()}));
    auto* fmt_opt = app.add_option("--format", formats, "comma list of csv,json,svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_validation;
    }

    cli::RunConfig config;
    try {
        const auto cmd = cli::command_from_string(command);
        if (!cmd)
            throw ConfigError(ErrorKind::config_value, "unknown command '" + command + "'",
                              "command");
        std::ifstream in(config_path, std::ios::binary);
        if (!in)
            throw ConfigError(ErrorKind::config_value, "cannot read config file " + config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        config = cli::parse_config(buf.str());
        if (config.command != *cmd)
            throw ConfigError(ErrorKind::config_value,
                              "command '" + command + "' does not match the config's command '" +
                                  cli::to_string(config.command) + "'",
                              "command");
    } catch (const Error& e) {
        std::cerr << "slitlab: " << to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_validation;
    }

    cli::RunOptions options;
    if (const char* env = std::getenv("SLITLAB_OUT"); env && *env)
        options.out_dir = env;
    else if (*out_opt)
        options.out_dir = out_dir;
    if (*seed_opt)
        options.seed = seed;
    if (*fmt_opt) {
        auto list = split_formats(formats);
        for (const auto& f : list) {
            if (f != "csv" && f != "json" && f != "svg") {
                std::cerr << "slitlab: unknown format '" << f << "'\n";
                return exit_validation;
            }
        }
        options.formats = list;
    }

    const cli::RunManifest manifest = cli::run(config, options);
    if (!manifest.summary.empty())
        std::cout << manifest.summary;
    for (const auto& w : manifest.warnings)
        std::cerr << "slitlab: warning: " << w << "\n";
    if (!manifest.ok) {
        std::cerr << "slitlab: stage '" << manifest.failed_stage << "' failed: " << manifest.error
                  << "\n";
        return manifest.validation_failure() ? exit_validation : exit_pipeline;
    }
    std::cout << "wrote " << manifest.outputs.size() + 1 << " files ("
              << manifest.hash_algorithm << " digests in manifest.json)\n";
    return exit_ok;
}
