// Command-line front end: one JSON configuration in, one report out.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include <CLI11.hpp>

#include "wold2d/run.hpp"

using namespace wold2d;

namespace {

int config_error(const std::string& msg) {
    std::cerr << "config error: " << msg << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-plane Wold decomposition toolkit"};
    std::string config_path, output_path, format_name, verify_scope;
    bool use_stdin = false;
    std::uint64_t seed = 1;
    auto* cfg_opt = app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    auto* stdin_opt = app.add_flag("--stdin", use_stdin, "read the configuration from standard input");
    cfg_opt->excludes(stdin_opt);
    app.add_option("--output", output_path, "write the report here instead of stdout");
    app.add_option("--format", format_name, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
    app.add_option("--seed", seed, "seed for simulations and randomized batteries");
    auto* verify_opt = app.add_option("--verify", verify_scope, "run the invariant battery: all or a module name");
    verify_opt->excludes(cfg_opt)->excludes(stdin_opt);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    Report report;
    Format format = Format::Json;
    try {
        if (!verify_scope.empty()) {
            SuiteOptions opt;
            opt.seed = seed;
            report = verify_suite(verify_scope, opt);
        } else {
            if (config_path.empty() && !use_stdin) return config_error("one of --config, --stdin or --verify is required");
            std::string text;
            if (use_stdin) {
                text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
            } else {
                std::ifstream in(config_path);
                text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
            }
            Json config;
            try {
                config = Json::parse(text);
            } catch (const Json::parse_error& e) {
                return config_error(std::string("malformed JSON: ") + e.what());
            }
            // a config may carry its own output block; flags win
            if (config.is_object() && config.contains("output")) {
                const Json& o = config["output"];
                if (!o.is_object()) return config_error("/output: expected an object");
                if (format_name.empty() && o.contains("format")) {
                    if (!o["format"].is_string()) return config_error("/output/format: expected a string");
                    format_name = o["format"].get<std::string>();
                }
                if (output_path.empty() && o.contains("path")) {
                    if (!o["path"].is_string()) return config_error("/output/path: expected a string");
                    output_path = o["path"].get<std::string>();
                }
            }
            report = run(config, seed);
        }
        if (!format_name.empty()) format = parse_format(format_name);
    } catch (const ConfigError& e) {
        return config_error(e.what());
    }

    try {
        if (output_path.empty()) {
            emit(report, std::cout, format);
        } else {
            std::ofstream out(output_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot open " + output_path);
            emit(report, out, format);
        }
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 1;
    }
    std::fprintf(stderr, "wall_time %.3f s\n", report.wall_time);
    return report.exit_code();
}
