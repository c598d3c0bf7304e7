// qfilter: command-line driver for the observed free-particle simulator.
//
//   qfilter <subcommand> [--config <path>] [--out <dir>]
//
// Exit status: 0 success, 1 a tolerance summary failed, 2 module or usage error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qfilter/commands.hpp"
#include "qfilter/config.hpp"
#include "qfilter/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Posterior dynamics of a continuously observed free quantum particle"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    for (std::string_view name : qfilter::subcommands) {
        CLI::App* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "flat key=value configuration file");
        sub->add_option("--out", out_dir, "output directory (overrides outputs.dir)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        qfilter::Config config = config_path.empty() ? qfilter::parse_config("") : qfilter::load_config(config_path);
        qfilter::apply_env_overrides(config);
        if (!out_dir.empty()) config.outputs.dir = out_dir;
        return qfilter::run_subcommand(name, config, config.outputs.dir, std::cout);
    } catch (const qfilter::Error& e) {
        std::cerr << "error: code=" << e.code() << " message=" << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: code=Internal message=" << e.what() << '\n';
        return 2;
    }
}
