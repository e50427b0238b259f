#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "bimodal/io.hpp"
#include "bimodal/keyval.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using namespace bimodal;

namespace {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("bimodal_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, AttractorPrintsTheCoexistingCycles)
{
    const fs::path dir = fresh_dir("attractor");
    const Result r = run_cli({"attractor", "--b", "-11.9655", "--k", "-28.854", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("attractors=2"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("period=5"), std::string::npos);
    EXPECT_NE(r.out.find("period=7"), std::string::npos);
    std::ifstream csv(dir / "attractor.csv");
    const auto records = parse_attractor_csv(csv);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].period + records[1].period, 12u);
}

TEST(Cli, ConfigErrorsExitWithTwo)
{
    const fs::path dir = fresh_dir("badcfg");
    std::ofstream(dir / "bad.cfg") << "nb = 4\nnk = four\n";
    const Result r = run_cli({"scan", "--config", (dir / "bad.cfg").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("'nk'"), std::string::npos) << r.err;

    std::ofstream(dir / "typo.cfg") << "nb = 4\nnbb = 4\n";
    const Result typo = run_cli({"scan", "--config", (dir / "typo.cfg").string(), "--out", dir.string()});
    EXPECT_EQ(typo.code, 2);
    EXPECT_NE(typo.err.find("nbb"), std::string::npos) << typo.err;

    EXPECT_EQ(run_cli({"scan", "--nb", "0"}).code, 2);
    EXPECT_EQ(run_cli({"no-such-command"}).code, 2);
    EXPECT_EQ(run_cli({"scan", "--config", (dir / "missing.cfg").string()}).code, 2);
}

TEST(Cli, RuntimeFailuresExitWithOne)
{
    const Result r = run_cli({"period2", "--b", "-1", "--k", "-3", "--out", fresh_dir("p2").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, ScanOutsidePIsAllOutsideAndReparses)
{
    const fs::path dir = fresh_dir("outside");
    const Result r = run_cli({"scan", "--b-min", "0.5", "--b-max", "1", "--k-min", "-10", "--k-max", "-5", "--nb", "4",
                              "--nk", "3", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(dir / "scan.csv");
    const auto rows = parse_grid_csv(csv);
    ASSERT_EQ(rows.size(), 12u);
    for (const GridRow& row : rows) EXPECT_EQ(row.region, RegionTag::OutsideP);
    for (const char* ch : {"period", "bistable", "lyapunov"}) {
        EXPECT_TRUE(fs::exists(dir / (std::string("scan_") + ch + ".ppm")));
        EXPECT_TRUE(fs::exists(dir / (std::string("scan_") + ch + ".ppm.json")));
    }
}

TEST(Cli, ProgressLinesAreMachineReadable)
{
    const Result r = run_cli({"scan", "--b-min", "-12", "--b-max", "-11", "--k-min", "-30", "--k-max", "-29", "--nb", "4",
                              "--nk", "200", "--n-transient", "500", "--out", fresh_dir("progress").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::regex line(R"(progress job=scan done=(\d+) total=200 percent=(\d+))");
    std::istringstream err(r.err);
    std::string s;
    int count = 0, last = -1;
    while (std::getline(err, s)) {
        std::smatch m;
        if (!std::regex_match(s, m, line)) continue;
        const int pct = std::stoi(m[2]);
        EXPECT_GT(pct, last);
        last = pct;
        ++count;
    }
    EXPECT_EQ(count, 100);
    EXPECT_EQ(last, 100);
}

TEST(Cli, IdenticalConfigsGiveIdenticalBytes)
{
    const std::vector<std::string> base{"scan",  "--b-min", "-11.975", "--b-max", "-11.955", "--k-min", "-28.87",
                                        "--k-max", "-28.84", "--nb", "12", "--nk", "12", "--n-transient", "20000"};
    const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
    auto args_a = base, args_b = base;
    args_a.insert(args_a.end(), {"--out", a.string()});
    args_b.insert(args_b.end(), {"--out", b.string()});
    args_b.insert(args_b.begin(), {"--threads", "3"});
    ASSERT_EQ(run_cli(args_a).code, 0);
    ASSERT_EQ(run_cli(args_b).code, 0);
    for (const char* name : {"scan.csv", "scan_period.ppm", "scan_bistable.ppm", "scan_lyapunov.ppm.json"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
}

TEST(Cli, EnvironmentOverridesConfigKeys)
{
    const fs::path dir = fresh_dir("env");
    ::setenv("BIMODAL_NB", "2", 1);
    const Result r = run_cli({"scan", "--b-min", "0.5", "--b-max", "1", "--k-min", "-10", "--k-max", "-5", "--nk", "2",
                              "--out", dir.string()});
    ::unsetenv("BIMODAL_NB");
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(dir / "scan.csv");
    EXPECT_EQ(parse_grid_csv(csv).size(), 4u);
}

TEST(Cli, RecipesAreBundledAndValid)
{
    std::vector<std::string> names;
    for (const cli::Recipe& r : cli::bundled_recipes()) {
        names.push_back(r.name);
        KeyValueConfig cfg = KeyValueConfig::parse(r.text, r.name);
        EXPECT_FALSE(cfg.get_string("command", "").empty()) << r.name;
    }
    for (const char* want : {"fig2_boundary", "fig2_scan", "fig3", "fig4", "fig5_scan", "fig5_curves",
                             "fig5_attractors", "fig6_scan", "fig6_attractors"}) {
        EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
    }
    const Result list = run_cli({"figures", "--list"});
    EXPECT_EQ(list.code, 0);
    EXPECT_NE(list.out.find("fig5_attractors"), std::string::npos);
    EXPECT_EQ(run_cli({"figures", "--only", "fig99", "--out", fresh_dir("nofig").string()}).code, 2);
}

TEST(Cli, LongCycleAttractorRecipe)
{
    const fs::path dir = fresh_dir("fig6");
    const Result r = run_cli({"figures", "--only", "fig6_attractors", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(dir / "fig6_attractors.csv");
    const auto records = parse_attractor_csv(csv);
    ASSERT_EQ(records.size(), 4u);
    EXPECT_EQ(records[0].period + records[1].period, 76u);
    EXPECT_EQ(records[2].kind, AttractorKind::Chaotic);
    EXPECT_EQ(records[3].kind, AttractorKind::Chaotic);
}

TEST(Cli, SweepRecipeWritesTailsAndEnvelope)
{
    const fs::path dir = fresh_dir("fig3");
    const Result r = run_cli({"figures", "--only", "fig3", "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream tails(dir / "fig3_tails.csv");
    const CsvTable t = read_csv(tails, kSweepColumns);
    EXPECT_GT(t.rows.size(), 1000u);
    std::ifstream env(dir / "fig3_envelope.csv");
    const CsvTable e = read_csv(env, kEnvelopeColumns);
    ASSERT_EQ(e.rows.size(), 1000u);
    for (const auto& row : e.rows) EXPECT_EQ(*parse_number(row[e.column("k")]), -40.0);
}

TEST(Cli, OdePoincareWritesEventsAndCloud)
{
    const fs::path dir = fresh_dir("ode");
    const Result r = run_cli({"ode-poincare", "--n-events", "30", "--overlay-b", "-12", "--overlay-k", "-30", "--out",
                              dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream ev(dir / "ode_poincare_events.csv");
    EXPECT_EQ(parse_events_csv(ev).size(), 30u);
    std::ifstream cloud(dir / "ode_poincare_cloud.csv");
    EXPECT_EQ(read_csv(cloud, {"x", "x_next", "f_x"}).rows.size(), 29u);
}
