#include "burgers_lab/config.hpp"
#include "burgers_lab/experiments.hpp"
#include "burgers_lab/io.hpp"
#include "burgers_lab/solver.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace burgers_lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("burgers_lab_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string("\"") + BURGERS_LAB_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ExperimentConfig from_toml(const std::string& text) { return parse_config(parse_config_text(text, true)); }

const char* kHeat = R"(
schema_version = 1
experiment = "oracle"
[solver]
nu = 0.1
n = 64
dt = 1e-3
[flux]
kind = "zero"
[initial]
shape = "sin"
[oracle]
T = 0.2
)";

}  // namespace

// ---------------------------------------------------------------------------
// Config parsing

TEST(Config, TomlAndJsonAgree) {
    const ExperimentConfig a = load_config(fs::path(CONFIG_DIR) / "oracle_heat.toml");
    const ExperimentConfig b = load_config(fs::path(CONFIG_DIR) / "oracle_heat.json");
    EXPECT_EQ(a.experiment, ExperimentKind::Oracle);
    EXPECT_EQ(b.experiment, ExperimentKind::Oracle);
    EXPECT_EQ(a.solver.nu, b.solver.nu);
    EXPECT_EQ(a.solver.n, b.solver.n);
    EXPECT_EQ(a.solver.dt, b.solver.dt);
    EXPECT_EQ(a.oracle.T, b.oracle.T);
    const auto g = make_grid(a.solver.n);
    const Field ua = a.initial.build(g, 1), ub = b.initial.build(g, 1);
    for (std::size_t j = 0; j < g.n(); ++j) EXPECT_EQ(ua[j], ub[j]);
}

TEST(Config, ShippedConfigsValidate) {
    int count = 0;
    for (const auto& e : fs::directory_iterator(CONFIG_DIR)) {
        SCOPED_TRACE(e.path().string());
        EXPECT_NO_THROW(load_config(e.path()).validate());
        ++count;
    }
    EXPECT_GE(count, 7);
}

TEST(Config, NegativeViscosityRejected) {
    std::string text = kHeat;
    text.replace(text.find("nu = 0.1"), 8, "nu = -1.0");
    try {
        from_toml(text).validate();
        FAIL() << "expected rejection";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("nu must be positive"), std::string::npos);
    }
}

TEST(Config, UnknownKeyRejected) {
    EXPECT_THROW(from_toml(std::string(kHeat) + "\n[extra]\nx = 1\n"), ConfigError);
    std::string text = kHeat;
    text.replace(text.find("dt = 1e-3"), 9, "dt = 1e-3\nstep = 2");
    EXPECT_THROW(from_toml(text), ConfigError);
}

TEST(Config, SchemaVersionRequired) {
    std::string text = kHeat;
    text.replace(text.find("schema_version = 1"), 18, "schema_version = 7");
    EXPECT_THROW(from_toml(text).validate(), ConfigError);
    text = kHeat;
    text.replace(text.find("schema_version = 1"), 18, "");
    EXPECT_THROW(from_toml(text), ConfigError);
}

TEST(Config, SyntaxErrorsAreConfigErrors) {
    EXPECT_THROW(parse_config_text("nu = = 1", true), ConfigError);
    EXPECT_THROW(parse_config_text("{\"a\": }", false), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/file.toml"), ConfigError);
}

TEST(Config, ExperimentSpecificValidation) {
    std::string text = kHeat;
    text += "\n[forcing]\nkind = \"steady\"\nprofile = { shape = \"sin\" }\n";
    EXPECT_THROW(from_toml(text).validate(), ConfigError);
    EXPECT_THROW(parse_experiment_kind("bogus"), ConfigError);
    for (ExperimentKind k : all_experiment_kinds()) EXPECT_EQ(parse_experiment_kind(to_string(k)), k);
}

TEST(Config, DefaultsValidate) {
    for (ExperimentKind k : all_experiment_kinds()) {
        SCOPED_TRACE(to_string(k));
        EXPECT_NO_THROW(default_config(k).validate());
    }
}

// ---------------------------------------------------------------------------
// Output formats

TEST(Io, CsvFormat) {
    io::CsvTable t({"t", "value"});
    t.add_row({0.1, 1.0 / 3.0});
    t.add_row({2.0, -0.0});
    EXPECT_EQ(t.str(), "t,value\n0.10000000000000001,0.33333333333333331\n2,-0\n");
    EXPECT_EQ(t.str().find('\r'), std::string::npos);
    EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Io, DoublesRoundTrip) {
    for (double v : {0.1, 1e-300, 123456.789, -2.5e-17, 1.0 / 7.0}) {
        EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
        const auto j = nlohmann::json::parse(io::dump_json(nlohmann::json{{"v", v}}));
        EXPECT_EQ(j["v"].get<double>(), v);
    }
    EXPECT_EQ(io::number(std::nan("")), "nan");
}

TEST(Io, JsonKeysSorted) {
    nlohmann::json j;
    j["zeta"] = 1;
    j["alpha"] = 2;
    j["mid"] = {{"b", 1}, {"a", 2}};
    const std::string s = io::dump_json(j);
    EXPECT_LT(s.find("alpha"), s.find("mid"));
    EXPECT_LT(s.find("mid"), s.find("zeta"));
    EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
    EXPECT_EQ(s.back(), '\n');
}

TEST(Io, SnapshotRoundTrip) {
    const auto g = make_grid(16);
    SolverConfig cfg;
    cfg.n = 16;
    cfg.dt = 0.05;
    cfg.snapshot_stride = 3;
    const Field u0 = sample(g, [](double x) { return std::sin(6.283185307179586 * x); });
    const Trajectory tr = solve(u0, ForcingModel::zero(), FluxModel::quadratic(), cfg, 0.0, 1.0);
    const fs::path p = scratch("snap") / "s.bin";
    io::write_snapshots(p, tr);
    const io::SnapshotFile f = io::read_snapshots(p);
    EXPECT_EQ(f.n, 16u);
    ASSERT_EQ(f.times, tr.snapshot_times);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(f.values[i][j], tr.snapshots[i][j]);
    }
    EXPECT_EQ(fs::file_size(p), 16 + 8 * f.times.size() * 17);
}

TEST(Io, NormsTableHeader) {
    const auto g = make_grid(16);
    SolverConfig cfg;
    cfg.n = 16;
    const Trajectory tr = solve(Field::constant(g, 1.0), ForcingModel::zero(), FluxModel::zero(), cfg, 0.0, 0.01);
    const std::string s = io::norms_table(tr).str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "t,l1,l2,linf,h1,h2,mean,min,max,l2sq,dx_l2sq,h_dot_u,dt_l2,dt_h2");
}

TEST(Io, ForcingPathTable) {
    StochasticSpec s;
    s.modes = 2;
    s.horizon = 0.01;
    const StochasticPath p(s, 1);
    const io::CsvTable t = io::forcing_path_table(p);
    EXPECT_EQ(t.header(), (std::vector<std::string>{"t", "a1", "b1", "a2", "b2"}));
    EXPECT_EQ(t.rows(), p.steps() + 1);
}

TEST(Io, SvgStampOnlyWhenAsked) {
    io::PlotOptions opt;
    opt.title = "decay";
    opt.log_y = true;
    const std::vector<io::PlotSeries> s{{"a", {0, 1, 2}, {1, 0.1, 0.01}}};
    const std::string plain = io::svg_plot(s, opt);
    EXPECT_EQ(plain, io::svg_plot(s, opt));
    EXPECT_NE(plain.find("<svg"), std::string::npos);
    opt.stamp = "2026-01-01T00:00:00Z";
    EXPECT_NE(io::svg_plot(s, opt).find("2026-01-01T00:00:00Z"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Catalog

TEST(Catalog, Contents) {
    const std::string text = catalog_text();
    EXPECT_NE(text.find("contraction → Theorem 3.1"), std::string::npos);
    EXPECT_NE(text.find("stochastic_sync → Theorem 4.3"), std::string::npos);
    EXPECT_EQ(experiment_catalog().size(), all_experiment_kinds().size());
    for (const auto& e : experiment_catalog()) EXPECT_NE(std::string(e.anchor), "");
}

// ---------------------------------------------------------------------------
// Binary

TEST(Cli, ListPrintsCatalog) {
    const fs::path dir = scratch("list");
    EXPECT_EQ(run_cli("list", dir / "log"), 0);
    const std::string out = slurp(dir / "log");
    EXPECT_NE(out.find("contraction → Theorem 3.1"), std::string::npos);
    EXPECT_NE(out.find("stochastic_sync → Theorem 4.3"), std::string::npos);
}

TEST(Cli, OracleRunPassesAndIsReproducible) {
    const fs::path dir = scratch("oracle");
    const std::string cfg = (fs::path(CONFIG_DIR) / "oracle_heat.toml").string();
    ASSERT_EQ(run_cli("run \"" + cfg + "\" --quiet --out \"" + (dir / "a").string() + "\"", dir / "log_a"), 0)
        << slurp(dir / "log_a");
    ASSERT_EQ(run_cli("run \"" + cfg + "\" --quiet --out \"" + (dir / "b").string() + "\"", dir / "log_b"), 0);
    const auto report = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    EXPECT_TRUE(report["passed"].get<bool>());
    EXPECT_LT(report["results"]["sup_error"].get<double>(), 1e-6);
    for (const char* f : {"report.json", "norms.csv", "error.csv", "snapshots.bin", "error.svg"}) {
        SCOPED_TRACE(f);
        ASSERT_TRUE(fs::exists(dir / "a" / f));
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f));
    }
}

TEST(Cli, EnvironmentSetsDefaultOutput) {
    const fs::path dir = scratch("env");
    const std::string cfg = (fs::path(CONFIG_DIR) / "oracle_heat.json").string();
    ASSERT_EQ(::setenv("BURGERS_LAB_OUT", dir.c_str(), 1), 0);
    const int code = run_cli("run \"" + cfg + "\" --quiet", dir / "log");
    ::unsetenv("BURGERS_LAB_OUT");
    EXPECT_EQ(code, 0) << slurp(dir / "log");
    EXPECT_TRUE(fs::exists(dir / "oracle" / "report.json"));
}

TEST(Cli, ConfigErrorExitsTwo) {
    const fs::path dir = scratch("bad");
    std::string text = kHeat;
    text.replace(text.find("nu = 0.1"), 8, "nu = -1.0");
    io::write_text(dir / "bad.toml", text);
    EXPECT_EQ(run_cli("run \"" + (dir / "bad.toml").string() + "\" --out \"" + (dir / "o").string() + "\"",
                      dir / "log"),
              2);
    const std::string log = slurp(dir / "log");
    EXPECT_NE(log.find("nu must be positive"), std::string::npos);
    EXPECT_NE(log.find("\"error\":\"config\""), std::string::npos);
    EXPECT_EQ(run_cli("run /nonexistent.toml", dir / "log2"), 2);
    EXPECT_EQ(run_cli("frobnicate", dir / "log3"), 2);
}

TEST(Cli, AssertionFailureExitsOne) {
    const fs::path dir = scratch("fail");
    io::write_text(dir / "tight.toml", std::string(kHeat) + "tolerance = 1e-30\n");
    EXPECT_EQ(run_cli("run \"" + (dir / "tight.toml").string() + "\" --quiet --out \"" + (dir / "o").string() + "\"",
                      dir / "log"),
              1);
    const auto report = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    EXPECT_FALSE(report["passed"].get<bool>());
    EXPECT_FALSE(report["failures"].empty());
}
