#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "bimodal/errors.hpp"
#include "bimodal/io.hpp"
#include "bimodal/keyval.hpp"

using namespace bimodal;

namespace {

std::string message_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Format, ShortestRoundTrip)
{
    EXPECT_EQ(format_number(-28.854), "-28.854");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1e-20), "1e-20");
    EXPECT_EQ(format_number(std::nan("")), "");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "");
    EXPECT_EQ(format_number(3.14159265358979, 4), "3.142");
    const double v = -11.965364872316353;
    EXPECT_EQ(*parse_number(format_number(v)), v);
    EXPECT_FALSE(parse_number("").has_value());
    EXPECT_FALSE(parse_number("1.5x").has_value());
    EXPECT_EQ(*parse_integer("-7"), -7);
    EXPECT_FALSE(parse_integer("7.5").has_value());
    std::istringstream bad_row("t,x,y1,y2,s\n1,2,3,oops,5\n");
    EXPECT_THROW(parse_events_csv(bad_row), ParseError);
}

TEST(Csv, ReadWithCommentAndHeaderCheck)
{
    std::istringstream in("# made by hand\na,b\n1,2\n3,4\n");
    const CsvTable t = read_csv(in, {"a", "b"});
    EXPECT_EQ(t.comment, "made by hand");
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][t.column("b")], "4");
    EXPECT_THROW(t.column("c"), ParseError);

    std::istringstream wrong_header("a,c\n1,2\n");
    EXPECT_THROW(read_csv(wrong_header, {"a", "b"}), ParseError);
    std::istringstream ragged("a,b\n1,2,3\n");
    EXPECT_THROW(read_csv(ragged), ParseError);
}

TEST(Csv, GridRoundTrip)
{
    ScanGrid grid;
    grid.b_range = {-12.0, -11.0};
    grid.k_range = {-30.0, -29.0};
    grid.nb = 2;
    grid.nk = 1;
    CellSummary a;
    a.region = RegionTag::Bimodal;
    a.periods = {5, 7};
    a.bistable = true;
    a.lyapunov_max = -0.125;
    CellSummary b;
    b.region = RegionTag::OutsideP;
    grid.cells = {a, b};
    std::stringstream ss;
    write_grid_csv(ss, grid, "nb=2 nk=1");
    const auto rows = parse_grid_csv(ss);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].p, grid.center(0, 0));
    EXPECT_EQ(rows[0].region, RegionTag::Bimodal);
    EXPECT_EQ(rows[0].period1, 5);
    EXPECT_EQ(rows[0].period2, 7);
    EXPECT_TRUE(rows[0].bistable);
    EXPECT_NEAR(*rows[0].lyapunov, -0.125, 1e-12);
    EXPECT_EQ(rows[1].region, RegionTag::OutsideP);
    EXPECT_FALSE(rows[1].period1.has_value());
    EXPECT_FALSE(rows[1].period2.has_value());
}

TEST(Csv, AttractorRoundTrip)
{
    const MapParams p{-11.9655, -28.854};
    const AttractorSet set = attractor_set(p);
    const auto records = attractor_records(p, set);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].seed_tag, "max");
    EXPECT_EQ(records[1].seed_tag, "min");
    std::stringstream ss;
    write_attractor_csv(ss, records);
    const auto back = parse_attractor_csv(ss);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back[i].p, p);
        EXPECT_EQ(back[i].kind, records[i].kind);
        EXPECT_EQ(back[i].period, records[i].period);
        ASSERT_EQ(back[i].points.size(), records[i].points.size());
        for (std::size_t j = 0; j < back[i].points.size(); ++j) {
            EXPECT_NEAR(back[i].points[j], records[i].points[j], 1e-10 * (1 + std::abs(records[i].points[j])));
        }
    }
}

TEST(Csv, CurvesAndIntersectionsRoundTrip)
{
    BifurcationCurve fold;
    fold.kind = BifurcationKind::Fold;
    fold.n = 5;
    fold.points = {{-11.96, -28.85, 0.25, 5, BifurcationKind::Fold}, {-11.961, -28.851, 0.26, 5, BifurcationKind::Fold}};
    BifurcationCurve flip = fold;
    flip.kind = BifurcationKind::Flip;
    flip.n = 7;
    for (auto& pt : flip.points) {
        pt.kind = BifurcationKind::Flip;
        pt.n = 7;
    }
    EXPECT_EQ(curve_id(fold), "fold_5");
    EXPECT_EQ(curve_id(flip), "flip_7");
    std::stringstream ss;
    write_curves_csv(ss, {fold, flip});
    const auto curves = parse_curves_csv(ss);
    ASSERT_EQ(curves.size(), 2u);
    EXPECT_EQ(curve_id(curves[1]), "flip_7");
    ASSERT_EQ(curves[0].points.size(), 2u);
    EXPECT_NEAR(curves[0].points[1].k, -28.851, 1e-13);

    std::stringstream js;
    write_intersections_json(js, {{"fold_5", "fold_7", -11.965364872316353, -28.852180280145976}});
    const auto xs = parse_intersections_json(js);
    ASSERT_EQ(xs.size(), 1u);
    EXPECT_EQ(xs[0].second, "fold_7");
    EXPECT_EQ(xs[0].b, -11.965364872316353);
    std::istringstream bad("{\"curves\": 3}");
    EXPECT_THROW(parse_intersections_json(bad), ParseError);
}

TEST(Csv, BoundaryRoundTrip)
{
    const auto samples = sample_boundary_curves(-60.0, -8.0, 7);
    std::stringstream ss;
    write_boundary_csv(ss, samples);
    const auto back = parse_boundary_csv(ss);
    ASSERT_EQ(back.size(), samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        EXPECT_EQ(back[i].curve_id, samples[i].curve_id);
        EXPECT_NEAR(back[i].k, samples[i].k, 1e-13 * std::abs(samples[i].k));
        EXPECT_NEAR(back[i].b, samples[i].b, 1e-13 * std::abs(samples[i].b));
    }
}

TEST(Csv, SweepFilesHaveTheirColumns)
{
    SweepConfig cfg;
    cfg.n_points = 5;
    cfg.n_plot = 3;
    cfg.n_transient = 100;
    const SweepDiagram d = sweep(cfg);
    std::stringstream tails, env;
    write_sweep_csv(tails, d, "k=-40");
    write_envelope_csv(env, d, "k=-40");
    const CsvTable t = read_csv(tails, kSweepColumns);
    EXPECT_EQ(t.comment, "k=-40");
    EXPECT_EQ(t.rows.size(), 5u * 2u * 3u);
    const CsvTable e = read_csv(env, kEnvelopeColumns);
    ASSERT_EQ(e.rows.size(), 5u);
    EXPECT_EQ(*parse_number(e.rows[0][e.column("param")]), -39.9);
}

TEST(Csv, EventsRoundTripAndCloudOverlay)
{
    std::vector<SectionEvent> events{{1.5, -0.25, {0.2, 0.15, 0.21}}, {9.75, 0.5, {0.1, 0.2, 0.21}}};
    std::stringstream ss;
    write_events_csv(ss, events, "s_level=0.21");
    const auto back = parse_events_csv(ss);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].t, 9.75);
    EXPECT_EQ(back[0].state.y2, 0.15);

    std::stringstream cloud;
    write_cloud_csv(cloud, {{0.0, 1.0}}, MapParams{-12.0, -30.0}, "");
    const CsvTable t = read_csv(cloud, {"x", "x_next", "f_x"});
    EXPECT_EQ(*parse_number(t.rows[0][2]), 3.0);
}

TEST(KeyValue, ParsesTypedValues)
{
    auto cfg = KeyValueConfig::parse("# header\nnb = 40\nb_min=-12.5   # trailing\nchannel = period\nflag = yes\n");
    EXPECT_EQ(cfg.get_count("nb", 1), 40u);
    EXPECT_EQ(cfg.get_double("b_min", 0.0), -12.5);
    EXPECT_EQ(cfg.get_string("channel", ""), "period");
    EXPECT_TRUE(cfg.get_bool("flag", false));
    EXPECT_EQ(cfg.get_int("missing", -3), -3);
    EXPECT_NO_THROW(cfg.reject_unused());
}

TEST(KeyValue, ErrorsNameLineAndField)
{
    const std::string bad_number = message_of([] {
        auto cfg = KeyValueConfig::parse("a = 1\nnb = ten\n", "grid.cfg");
        cfg.get_count("nb", 1);
    });
    EXPECT_NE(bad_number.find("grid.cfg line 2"), std::string::npos) << bad_number;
    EXPECT_NE(bad_number.find("'nb'"), std::string::npos);
    EXPECT_NE(bad_number.find("'ten'"), std::string::npos);

    EXPECT_THROW(KeyValueConfig::parse("novalue\n"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("x =\n"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("x = 1\nx = 2\n"), ConfigError);
    EXPECT_THROW(KeyValueConfig::parse("bad key = 1\n"), ConfigError);
    auto cfg = KeyValueConfig::parse("nb = -4\nq = 1.5\n");
    EXPECT_THROW(cfg.get_count("nb", 1), ConfigError);
    EXPECT_THROW(cfg.get_int("q", 1), ConfigError);
    EXPECT_THROW(cfg.require_double("absent"), ConfigError);
    EXPECT_THROW(KeyValueConfig::load("/nonexistent/x.cfg"), ConfigError);
}

TEST(KeyValue, UnusedKeysAreReported)
{
    auto cfg = KeyValueConfig::parse("nb = 3\ntypo_key = 1\n", "a.cfg");
    cfg.get_count("nb", 1);
    const std::string msg = message_of([&] { cfg.reject_unused(); });
    EXPECT_NE(msg.find("typo_key"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(KeyValue, EnvironmentAndCommandLinePrecedence)
{
    auto cfg = KeyValueConfig::parse("nb = 3\nnk = 4\n");
    ::setenv("BIMODALTEST_NB", "11", 1);
    ::setenv("BIMODALTEST_NK", "12", 1);
    cfg.apply_environment("BIMODALTEST_");
    cfg.set("nk", "99");
    EXPECT_EQ(cfg.get_count("nb", 1), 11u);
    EXPECT_EQ(cfg.get_count("nk", 1), 99u);
    EXPECT_TRUE(cfg.has("nb"));
    ::setenv("BIMODALTEST_NB", "oops", 1);
    const std::string msg = message_of([&] { cfg.get_count("nb", 1); });
    EXPECT_NE(msg.find("BIMODALTEST_NB"), std::string::npos) << msg;
    ::unsetenv("BIMODALTEST_NB");
    ::unsetenv("BIMODALTEST_NK");
    EXPECT_EQ(cfg.get_count("nb", 1), 3u);
}
