// needleseek run <config> [--out dir] | needleseek list
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure (escape, divergence).

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "needleseek/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& config_path, const std::string& out_dir) {
    using namespace needleseek;
    try {
        const ConfigMap cfg = parse_config_file(config_path);
        const CsvTable table = run_experiment(cfg, std::cerr, threads_from_env());
        const fs::path target = fs::path(out_dir) / table.file_name;
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        if (!out) {
            std::cerr << "error: config: cannot write '" << target.string() << "'\n";
            return 2;
        }
        out << table.content;
        std::cout << target.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: numeric: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"needle-variation gradient approximation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    auto* run_cmd = app.add_subcommand("run", "run the experiment described by a config file");
    run_cmd->add_option("config", config_path, "config file (key = value lines)")->required();
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* list_cmd = app.add_subcommand("list", "list experiment kinds and their keys");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        std::cout << needleseek::list_experiments();
        return 0;
    }
    return run(config_path, out_dir);
}
