// burgers_lab command line: run a configured experiment or list the catalog.

#include "burgers_lab/config.hpp"
#include "burgers_lab/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

// Overrides the config's output_dir when set and --out is not given.
constexpr const char* kOutEnv = "BURGERS_LAB_OUT";

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw burgers_lab::ConfigError("--seeds expects a comma-separated list of non-negative integers");
        }
        seeds.push_back(std::stoull(item));
    }
    if (seeds.empty()) throw burgers_lab::ConfigError("--seeds is empty");
    return seeds;
}

std::string utc_stamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void report_config_error(const std::string& message) {
    std::cerr << "config error: " << message << "\n";
    std::cerr << nlohmann::json{{"error", "config"}, {"failures", {message}}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments for the viscous generalised Burgers equation on the circle"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "print the experiment catalog");

    auto* run = app.add_subcommand("run", "run the experiment described by a TOML or JSON config");
    std::string config_path, out_dir, seeds_text;
    std::size_t threads = 0;
    bool stamp = false, quiet = false;
    run->add_option("config", config_path, "config file (.toml, or .json)")->required();
    run->add_option("--out", out_dir, std::string("output directory (default: $") + kOutEnv +
                                          "/<experiment>, else the config's output_dir)");
    run->add_option("--seeds", seeds_text, "comma-separated seed list replacing the config's seeds");
    run->add_option("--threads", threads, "worker threads for seed-parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--stamp", stamp, "write a UTC timestamp into the SVG plots");
    run->add_flag("--quiet", quiet, "no progress output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (list->parsed()) {
        std::cout << burgers_lab::catalog_text();
        return 0;
    }

    burgers_lab::ExperimentConfig cfg;
    try {
        cfg = burgers_lab::load_config(config_path);
        if (!seeds_text.empty()) {
            cfg.seeds = parse_seed_list(seeds_text);
            cfg.validate();
        }
        if (threads > 0) cfg.threads = threads;
    } catch (const burgers_lab::ConfigError& e) {
        report_config_error(e.what());
        return kExitConfig;
    }

    burgers_lab::RunContext ctx;
    if (!out_dir.empty()) {
        ctx.out_dir = out_dir;
    } else if (const char* env = std::getenv(kOutEnv); env && *env) {
        ctx.out_dir = std::filesystem::path(env) / burgers_lab::to_string(cfg.experiment);
    } else {
        ctx.out_dir = cfg.output_dir;
    }
    ctx.threads = cfg.threads;
    if (stamp) ctx.stamp = utc_stamp();
    if (!quiet) ctx.log = &std::cout;

    try {
        std::filesystem::create_directories(ctx.out_dir);
        const auto probe = ctx.out_dir / ".write_test";
        burgers_lab::io::write_text(probe, "");
        std::filesystem::remove(probe);
    } catch (const std::exception& e) {
        report_config_error("output directory not writable: " + ctx.out_dir.string() + " (" + e.what() + ")");
        return kExitConfig;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const burgers_lab::ExperimentResult result = burgers_lab::run_experiment(cfg, ctx);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << result.name << ": " << (result.passed() ? "PASS" : "FAIL") << " (" << seconds << " s, report "
                  << (ctx.out_dir / "report.json").string() << ")\n";
        if (!result.passed()) {
            for (const auto& f : result.failures) std::cout << "  failed: " << f << "\n";
            std::cerr << nlohmann::json{{"error", "assertion"}, {"failures", result.failures}}.dump() << "\n";
            return kExitFailed;
        }
        return 0;
    } catch (const burgers_lab::ConfigError& e) {
        report_config_error(e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        std::cerr << nlohmann::json{{"error", "runtime"}, {"failures", {e.what()}}}.dump() << "\n";
        return kExitFailed;
    }
}
