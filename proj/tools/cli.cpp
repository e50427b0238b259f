#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "bimodal/bifurcation.hpp"
#include "bimodal/errors.hpp"
#include "bimodal/io.hpp"
#include "bimodal/keyval.hpp"
#include "bimodal/ode.hpp"
#include "bimodal/orbit.hpp"
#include "bimodal/parallel.hpp"
#include "bimodal/regions.hpp"
#include "bimodal/scan.hpp"

namespace bimodal::cli {

namespace fs = std::filesystem;

namespace {

#include "recipes.inc"

struct JobContext {
    fs::path out_dir;
    std::string stem;
    int threads = 1;
    std::ostream* out = nullptr;
    std::ostream* err = nullptr;
};

/// "progress job=<stem> done=<d> total=<t> percent=<p>" whenever the
/// integer percentage advances (at most one line per percent).
class Progress {
public:
    Progress(std::ostream& err, std::string job, std::size_t total) : err_(err), job_(std::move(job)), total_(total) {}

    void update(std::size_t done)
    {
        std::lock_guard lock(mutex_);
        const int pct = total_ == 0 ? 100 : static_cast<int>(100 * done / total_);
        if (pct <= last_) return;
        last_ = pct;
        err_ << "progress job=" << job_ << " done=" << done << " total=" << total_ << " percent=" << pct << std::endl;
    }

private:
    std::ostream& err_;
    std::string job_;
    std::size_t total_;
    int last_ = 0;
    std::mutex mutex_;
};

std::ofstream open_output(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw fs::filesystem_error("cannot open output file", path, std::make_error_code(std::errc::io_error));
    }
    return out;
}

void finish_output(std::ofstream& out, const fs::path& path)
{
    out.close();
    if (!out) throw fs::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

[[noreturn]] void config_error(const KeyValueConfig& cfg, const std::string& field, const std::string& why)
{
    throw ConfigError(cfg.source() + ": field '" + field + "': " + why);
}

OrbitConfig read_orbit(KeyValueConfig& cfg)
{
    OrbitConfig o;
    o.n_transient = cfg.get_count("n_transient", o.n_transient);
    o.n_sample = cfg.get_count("n_sample", o.n_sample);
    o.max_iterations = cfg.get_count("max_iterations", o.max_iterations);
    if (o.n_sample < 2 * OrbitDefaults::max_period) {
        config_error(cfg, "n_sample", "must be at least " + std::to_string(2 * OrbitDefaults::max_period));
    }
    return o;
}

// "key=value " with the shortest round-trip number.
std::string kv(const char* key, double v)
{
    return std::string(key) + "=" + format_number(v) + " ";
}

std::string orbit_comment(const OrbitConfig& o)
{
    return "n_transient=" + std::to_string(o.n_transient) + " n_sample=" + std::to_string(o.n_sample) +
           " max_iterations=" + std::to_string(o.max_iterations);
}

// ---------------------------------------------------------------- scan

void job_scan(KeyValueConfig& cfg, const JobContext& ctx)
{
    ScanConfig sc;
    sc.b_range = {cfg.get_double("b_min", sc.b_range.lo), cfg.get_double("b_max", sc.b_range.hi)};
    sc.k_range = {cfg.get_double("k_min", sc.k_range.lo), cfg.get_double("k_max", sc.k_range.hi)};
    sc.nb = cfg.get_count("nb", sc.nb);
    sc.nk = cfg.get_count("nk", sc.nk);
    sc.orbit = read_orbit(cfg);
    const std::string seed_policy = cfg.get_string("seed_policy", "critical");
    const std::vector<std::string> channels = split_list(cfg.get_string("channels", "period,bistable,lyapunov"));
    cfg.reject_unused();

    if (seed_policy != "critical") config_error(cfg, "seed_policy", "only 'critical' is supported");
    if (!(sc.b_range.lo < sc.b_range.hi)) config_error(cfg, "b_max", "must exceed b_min");
    if (!(sc.k_range.lo < sc.k_range.hi)) config_error(cfg, "k_max", "must exceed k_min");
    std::vector<HeatmapChannel> parsed;
    for (const std::string& c : channels) {
        try {
            parsed.push_back(heatmap_channel_from_string(c));
        } catch (const DomainError&) {
            config_error(cfg, "channels", "unknown channel '" + c + "'");
        }
    }

    sc.threads = ctx.threads;
    Progress progress(*ctx.err, ctx.stem, sc.nk);
    sc.progress = [&](std::size_t done, std::size_t) { progress.update(done); };
    const ScanGrid grid = scan(sc);

    const std::string comment = kv("b_min", sc.b_range.lo) + kv("b_max", sc.b_range.hi) + kv("k_min", sc.k_range.lo) +
                                kv("k_max", sc.k_range.hi) + "nb=" + std::to_string(sc.nb) + " nk=" + std::to_string(sc.nk) +
                                " " + orbit_comment(sc.orbit) + " seed_policy=" + seed_policy;
    const fs::path csv = ctx.out_dir / (ctx.stem + ".csv");
    std::ofstream f = open_output(csv);
    write_grid_csv(f, grid, comment);
    finish_output(f, csv);
    for (HeatmapChannel ch : parsed) {
        render_heatmap(grid, ch, ctx.out_dir / (ctx.stem + "_" + std::string(to_string(ch)) + ".ppm"));
    }
    const auto bistable = std::count_if(grid.cells.begin(), grid.cells.end(), [](const CellSummary& c) { return c.bistable; });
    *ctx.out << ctx.stem << ": " << grid.cells.size() << " cells, " << bistable << " bistable, "
             << grid.unresolved_count() << " unresolved -> " << csv.string() << '\n';
}

// ---------------------------------------------------------------- sweep

void job_sweep(KeyValueConfig& cfg, const JobContext& ctx)
{
    SweepConfig sc;
    const std::string axis = cfg.get_string("axis", "b");
    sc.fixed_value = cfg.get_double("fixed", sc.fixed_value);
    sc.range = {cfg.get_double("lo", sc.range.lo), cfg.get_double("hi", sc.range.hi)};
    sc.n_points = cfg.get_count("n_points", sc.n_points);
    sc.n_plot = cfg.get_count("n_plot", sc.n_plot);
    sc.n_transient = cfg.get_count("n_transient", sc.n_transient);
    cfg.reject_unused();

    if (axis != "b" && axis != "k") config_error(cfg, "axis", "expected 'b' or 'k'");
    if (!(sc.range.lo < sc.range.hi)) config_error(cfg, "hi", "must exceed lo");
    if (sc.n_points < 2) config_error(cfg, "n_points", "must be at least 2");
    sc.axis = axis == "b" ? SweepAxis::B : SweepAxis::K;
    sc.threads = ctx.threads;

    const SweepDiagram d = sweep(sc);
    const std::string comment = "axis=" + axis + " " + kv("fixed", sc.fixed_value) + kv("lo", sc.range.lo) +
                                kv("hi", sc.range.hi) + "n_points=" + std::to_string(sc.n_points) +
                                " n_plot=" + std::to_string(sc.n_plot) + " n_transient=" + std::to_string(sc.n_transient);
    const fs::path tails = ctx.out_dir / (ctx.stem + "_tails.csv");
    const fs::path env = ctx.out_dir / (ctx.stem + "_envelope.csv");
    std::ofstream ft = open_output(tails);
    write_sweep_csv(ft, d, comment);
    finish_output(ft, tails);
    std::ofstream fe = open_output(env);
    write_envelope_csv(fe, d, comment);
    finish_output(fe, env);
    *ctx.out << ctx.stem << ": " << d.samples.size() << " samples -> " << tails.string() << ", " << env.string() << '\n';
}

// ---------------------------------------------------------------- curves

struct CurveRequest {
    BifurcationKind kind;
    int n;
};

CurveRequest parse_curve_request(const KeyValueConfig& cfg, const std::string& id)
{
    const auto us = id.find('_');
    if (us != std::string::npos) {
        const std::string kind = id.substr(0, us);
        const auto n = parse_integer(id.substr(us + 1));
        if ((kind == "fold" || kind == "flip") && n && *n >= 1 && *n <= 64) {
            return {kind == "fold" ? BifurcationKind::Fold : BifurcationKind::Flip, static_cast<int>(*n)};
        }
    }
    config_error(cfg, "curves", "expected ids like fold_5 or flip_7, got '" + id + "'");
}

void job_curves(KeyValueConfig& cfg, const JobContext& ctx)
{
    const bool boundary = cfg.get_bool("boundary", true);
    const double bk_lo = cfg.get_double("boundary_k_min", -60.0);
    const double bk_hi = cfg.get_double("boundary_k_max", -4.0);
    const auto bn = static_cast<int>(cfg.get_count("boundary_samples", 500));
    const std::vector<std::string> ids = split_list(cfg.get_string("curves", ""));
    const double b_lo = cfg.get_double("b_min", -11.975), b_hi = cfg.get_double("b_max", -11.955);
    const double k_lo = cfg.get_double("k_min", -28.87), k_hi = cfg.get_double("k_max", -28.84);
    const auto seed_grid = static_cast<int>(cfg.get_count("seed_grid", 30));
    const double pad = cfg.get_double("pad", 0.02);
    ContinuationOptions copt;
    copt.step = cfg.get_double("step", 2e-4);
    copt.max_points = cfg.get_count("max_points", copt.max_points);
    const bool intersect = cfg.get_bool("intersect", true);
    const std::vector<std::string> crisis = split_list(cfg.get_string("crisis_families", ""));
    const std::string crisis_axis = cfg.get_string("crisis_axis", "b");
    const double crisis_res = cfg.get_double("crisis_resolution", 5e-4);
    const OrbitConfig orbit = read_orbit(cfg);
    cfg.reject_unused();

    if (boundary && !(bk_lo < bk_hi && bk_hi <= -4.0)) config_error(cfg, "boundary_k_max", "need boundary_k_min < boundary_k_max <= -4");
    if (!(b_lo < b_hi)) config_error(cfg, "b_max", "must exceed b_min");
    if (!(k_lo < k_hi)) config_error(cfg, "k_max", "must exceed k_min");
    if (!(copt.step > 0.0)) config_error(cfg, "step", "must be positive");
    if (!(pad >= 0.0)) config_error(cfg, "pad", "must be non-negative");
    if (crisis_axis != "b" && crisis_axis != "k") config_error(cfg, "crisis_axis", "expected 'b' or 'k'");
    if (!(crisis_res > 0.0)) config_error(cfg, "crisis_resolution", "must be positive");
    std::vector<CurveRequest> requests;
    for (const std::string& id : ids) requests.push_back(parse_curve_request(cfg, id));
    std::vector<int> families;
    for (const std::string& s : crisis) {
        const auto n = parse_integer(s);
        if (!n || *n < 1) config_error(cfg, "crisis_families", "expected positive integers, got '" + s + "'");
        families.push_back(static_cast<int>(*n));
    }

    if (boundary) {
        const fs::path path = ctx.out_dir / (ctx.stem + "_boundary.csv");
        std::ofstream f = open_output(path);
        write_boundary_csv(f, sample_boundary_curves(bk_lo, bk_hi, bn));
        finish_output(f, path);
        *ctx.out << ctx.stem << ": boundary curves -> " << path.string() << '\n';
    }
    if (requests.empty() && families.empty()) return;

    copt.b_lo = b_lo - pad;
    copt.b_hi = b_hi + pad;
    copt.k_lo = k_lo - pad;
    copt.k_hi = std::min(k_hi + pad, -4.0);
    std::vector<BifurcationCurve> curves;
    Progress progress(*ctx.err, ctx.stem, requests.size() + families.size());
    std::size_t done = 0;
    for (const CurveRequest& r : requests) {
        const auto seed = harvest_seed(b_lo, b_hi, k_lo, k_hi, r.n, r.kind, seed_grid, orbit);
        if (!seed) {
            throw NoConvergence("no " + std::string(to_string(r.kind)) + " point of a " + std::to_string(r.n) +
                                    "-cycle found in the window",
                                0.0);
        }
        curves.push_back(continue_curve(*seed, copt));
        const BifurcationCurve& c = curves.back();
        *ctx.out << ctx.stem << ": " << curve_id(c) << " " << c.points.size() << " points (stops: "
                 << to_string(c.stop_backward) << ", " << to_string(c.stop_forward) << ")\n";
        progress.update(++done);
    }
    const fs::path path = ctx.out_dir / (ctx.stem + "_curves.csv");
    std::ofstream f = open_output(path);
    write_curves_csv(f, curves);
    finish_output(f, path);

    if (intersect && curves.size() > 1) {
        std::vector<IntersectionRecord> records;
        for (std::size_t i = 0; i < curves.size(); ++i) {
            for (std::size_t j = i + 1; j < curves.size(); ++j) {
                for (const CurveIntersection& x : intersect_curves(curves[i], curves[j])) {
                    records.push_back({curve_id(curves[i]), curve_id(curves[j]), x.b, x.k});
                    char line[160];
                    std::snprintf(line, sizeof line, "%s: %s x %s at b=%.12f k=%.12f\n", ctx.stem.c_str(),
                                  curve_id(curves[i]).c_str(), curve_id(curves[j]).c_str(), x.b, x.k);
                    *ctx.out << line;
                }
            }
        }
        const fs::path jpath = ctx.out_dir / (ctx.stem + "_intersections.json");
        std::ofstream jf = open_output(jpath);
        write_intersections_json(jf, records);
        finish_output(jf, jpath);
    }

    if (!families.empty()) {
        const fs::path cpath = ctx.out_dir / (ctx.stem + "_crisis.csv");
        std::ofstream cf = open_output(cpath);
        cf << "n_family,b,k\n";
        for (int n : families) {
            const auto samples = crisis_boundary_scan(b_lo, b_hi, k_lo, k_hi, n,
                                                      crisis_axis == "b" ? ScanAxis::B : ScanAxis::K, crisis_res, orbit,
                                                      ctx.threads);
            for (const CrisisBoundarySample& s : samples) {
                cf << s.n_family << ',' << format_number(s.b, 15) << ',' << format_number(s.k, 15) << '\n';
            }
            progress.update(++done);
        }
        finish_output(cf, cpath);
    }
}

// ---------------------------------------------------------------- attractor

std::vector<MapParams> read_points(KeyValueConfig& cfg)
{
    std::vector<MapParams> pts;
    if (cfg.has("points")) {
        const std::string list = cfg.get_string("points", "");
        std::size_t start = 0;
        while (start <= list.size()) {
            const std::size_t end = std::min(list.find(';', start), list.size());
            const auto fields = split_list(list.substr(start, end - start));
            start = end + 1;
            if (fields.empty()) continue;
            const auto b = fields.size() == 2 ? parse_number(fields[0]) : std::nullopt;
            const auto k = fields.size() == 2 ? parse_number(fields[1]) : std::nullopt;
            if (!b || !k) config_error(cfg, "points", "expected 'b k; b k; ...'");
            pts.push_back({*b, *k});
        }
    }
    if (cfg.has("b") || cfg.has("k")) pts.push_back({cfg.require_double("b"), cfg.require_double("k")});
    if (pts.empty()) throw ConfigError(cfg.source() + ": missing required field 'b' (or 'points')");
    return pts;
}

void job_attractor(KeyValueConfig& cfg, const JobContext& ctx)
{
    const std::vector<MapParams> pts = read_points(cfg);
    const OrbitConfig orbit = read_orbit(cfg);
    cfg.reject_unused();
    for (const MapParams& p : pts) {
        if (!in_domain_p(p) || !(p.k < -4.0)) {
            throw ConfigError(cfg.source() + ": point (" + format_number(p.b) + ", " + format_number(p.k) +
                              ") must satisfy k < b < 0 and k < -4");
        }
    }
    std::vector<AttractorRecord> records;
    for (const MapParams& p : pts) {
        const AttractorSet set = attractor_set(p, orbit);
        char line[256];
        std::snprintf(line, sizeof line, "b=%.10g k=%.10g region=%s attractors=%zu%s\n", p.b, p.k,
                      std::string(to_string(classify(p))).c_str(), set.attractors.size(), set.bistable ? " (coexisting)" : "");
        *ctx.out << line;
        for (std::size_t i = 0; i < set.attractors.size(); ++i) {
            const Attractor& a = set.attractors[i];
            std::string seeds;
            if (set.seed_owner[0] == i) seeds += " x_max";
            if (set.seed_owner[1] == i) seeds += " x_min";
            const char* unit = a.kind == AttractorKind::Chaotic ? "bands" : "period";
            std::snprintf(line, sizeof line, "  %s %s=%zu lyapunov=%.6g seeds:%s\n", std::string(to_string(a.kind)).c_str(),
                          unit, a.period, a.lyapunov, seeds.c_str());
            *ctx.out << line;
        }
        const auto recs = attractor_records(p, set);
        records.insert(records.end(), recs.begin(), recs.end());
    }
    const fs::path path = ctx.out_dir / (ctx.stem + ".csv");
    std::ofstream f = open_output(path);
    write_attractor_csv(f, records);
    finish_output(f, path);
}

// ---------------------------------------------------------------- period2

void job_period2(KeyValueConfig& cfg, const JobContext& ctx)
{
    const MapParams p{cfg.require_double("b"), cfg.require_double("k")};
    const std::size_t mesh = cfg.get_count("mesh", 200000);
    cfg.reject_unused();
    const Period2Orbit o = find_period2(p);
    const int roots = p.k < -4.0 ? period2_uniqueness_check(p, mesh) : -1;
    char line[256];
    std::snprintf(line, sizeof line, "x1=%.15g x2=%.15g u1=%.15g u2=%.15g B=%.15g k_from_u=%.15g\n", o.x1, o.x2, o.u1,
                  o.u2, o.B, o.k_reconstructed);
    *ctx.out << line;
    if (roots >= 0) *ctx.out << "roots of f^2(x) - x besides the fixed point: " << roots << '\n';

    std::ostringstream js;
    js.precision(17);
    js << "{\n  \"b\": " << p.b << ",\n  \"k\": " << p.k << ",\n  \"x1\": " << o.x1 << ",\n  \"x2\": " << o.x2
       << ",\n  \"u1\": " << o.u1 << ",\n  \"u2\": " << o.u2 << ",\n  \"B\": " << o.B << ",\n  \"k_from_u\": "
       << o.k_reconstructed << ",\n  \"mesh_roots\": " << roots << "\n}\n";
    const fs::path path = ctx.out_dir / (ctx.stem + ".json");
    std::ofstream f = open_output(path);
    f << js.str();
    finish_output(f, path);
}

// ---------------------------------------------------------------- ode

void job_ode(KeyValueConfig& cfg, const JobContext& ctx)
{
    // Defaults: an asymmetric regime whose orbits cross the section
    // every oscillation.
    OdeParams p{1.0, 2.75, 0.205, 0.223, 0.5, 1.75};
    p.m1 = cfg.get_double("m1", p.m1);
    p.m2 = cfg.get_double("m2", p.m2);
    p.lambda1 = cfg.get_double("lambda1", p.lambda1);
    p.lambda2 = cfg.get_double("lambda2", p.lambda2);
    p.a1 = cfg.get_double("a1", p.a1);
    p.a2 = cfg.get_double("a2", p.a2);
    OdeState st0{cfg.get_double("y1", 0.1), cfg.get_double("y2", 0.1), cfg.get_double("s", 0.5)};
    SectionRun run;
    run.s_level = cfg.get_double("s_level", 0.5 * (p.lambda1 + p.lambda2));
    run.n_events = cfg.get_count("n_events", 300);
    run.t_transient = cfg.get_double("t_transient", 500.0);
    run.t_max = cfg.get_double("t_max", 1e6);
    run.integrator.tol = cfg.get_double("tol", run.integrator.tol);
    const auto bins = static_cast<int>(cfg.get_count("bins", 50));
    std::optional<MapParams> overlay;
    if (cfg.has("overlay_b") || cfg.has("overlay_k")) {
        overlay = MapParams{cfg.require_double("overlay_b"), cfg.require_double("overlay_k")};
    }
    cfg.reject_unused();

    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(cfg.source() + ": " + e.what());
    }
    if (!(run.integrator.tol >= 1e-12 && run.integrator.tol <= 1e-4)) config_error(cfg, "tol", "must lie in [1e-12, 1e-4]");
    if (!(run.s_level > 0.0)) config_error(cfg, "s_level", "must be positive");
    if (!(st0.y1 >= 0 && st0.y2 >= 0 && st0.s >= 0)) config_error(cfg, "y1", "initial state must be non-negative");
    if (run.n_events < 2) config_error(cfg, "n_events", "must be at least 2");

    const std::vector<SectionEvent> events = collect_events(p, st0, run);
    const auto cloud = return_map_cloud(events);
    const std::string comment = kv("m1", p.m1) + kv("m2", p.m2) + kv("lambda1", p.lambda1) + kv("lambda2", p.lambda2) +
                                kv("a1", p.a1) + kv("a2", p.a2) + kv("s_level", run.s_level) + kv("tol", run.integrator.tol) +
                                "t_transient=" + format_number(run.t_transient);
    const fs::path epath = ctx.out_dir / (ctx.stem + "_events.csv");
    const fs::path cpath = ctx.out_dir / (ctx.stem + "_cloud.csv");
    std::ofstream fe = open_output(epath);
    write_events_csv(fe, events, comment);
    finish_output(fe, epath);
    std::ofstream fc = open_output(cpath);
    write_cloud_csv(fc, cloud, overlay, comment);
    finish_output(fc, cpath);
    char line[200];
    std::snprintf(line, sizeof line, "%s: %zu events, cloud thickness %.6g (%d bins)\n", ctx.stem.c_str(), events.size(),
                  cloud_thickness(cloud, bins), bins);
    *ctx.out << line;
}

// ---------------------------------------------------------------- dispatch

using JobFn = void (*)(KeyValueConfig&, const JobContext&);

const std::map<std::string, JobFn>& jobs()
{
    static const std::map<std::string, JobFn> table{
        {"scan", job_scan},       {"sweep", job_sweep},     {"curves", job_curves},
        {"attractor", job_attractor}, {"period2", job_period2}, {"ode-poincare", job_ode},
    };
    return table;
}

void run_job(const std::string& command, KeyValueConfig cfg, const JobContext& ctx)
{
    fs::create_directories(ctx.out_dir);
    jobs().at(command)(cfg, ctx);
}

void run_figures(const std::vector<std::string>& only, const JobContext& base)
{
    std::vector<const Recipe*> chosen;
    for (const Recipe& r : bundled_recipes()) {
        const bool wanted = only.empty() || std::any_of(only.begin(), only.end(), [&](const std::string& f) {
            return r.name == f || r.name.rfind(f + "_", 0) == 0;
        });
        if (wanted) chosen.push_back(&r);
    }
    for (const std::string& f : only) {
        const bool known = std::any_of(bundled_recipes().begin(), bundled_recipes().end(), [&](const Recipe& r) {
            return r.name == f || r.name.rfind(f + "_", 0) == 0;
        });
        if (!known) throw ConfigError("figures: no recipe named '" + f + "'");
    }
    // Parse every recipe first so a bad one fails before any work starts.
    std::vector<std::pair<std::string, KeyValueConfig>> parsed;
    for (const Recipe* r : chosen) {
        KeyValueConfig cfg = KeyValueConfig::parse(r->text, "recipe " + r->name + ".cfg");
        cfg.apply_environment();
        const std::string command = cfg.get_string("command", "");
        if (!jobs().count(command)) throw ConfigError(cfg.source() + ": field 'command': unknown '" + command + "'");
        parsed.emplace_back(command, std::move(cfg));
    }
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        JobContext ctx = base;
        ctx.stem = chosen[i]->name;
        run_job(parsed[i].first, parsed[i].second, ctx);
    }
}

}  // namespace

const std::vector<Recipe>& bundled_recipes()
{
    static const std::vector<Recipe> recipes = [] {
        std::vector<Recipe> out;
        for (const auto& [name, text] : kRecipes) out.push_back({name, text});
        std::sort(out.begin(), out.end(), [](const Recipe& a, const Recipe& b) { return a.name < b.name; });
        return out;
    }();
    return recipes;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Bimodal map explorer: attractors, parameter scans, bifurcation curves and the predator ODE"};
    app.name("bimodal");
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    struct Sub {
        CLI::App* app = nullptr;
        std::string config;
        std::string out_dir = ".";
        std::map<std::string, std::string> flags;  // config key -> flag value
        std::map<std::string, CLI::Option*> options;
    };
    std::map<std::string, Sub> subs;
    auto add_sub = [&](const std::string& name, const std::string& help, std::vector<std::pair<std::string, std::string>> flags) {
        Sub& s = subs[name];
        s.app = app.add_subcommand(name, help);
        s.app->add_option("--config", s.config, "key = value configuration file");
        s.app->add_option("--out", s.out_dir, "Output directory")->capture_default_str();
        for (const auto& [key, flag_help] : flags) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            s.options[key] = s.app->add_option(flag, s.flags[key], flag_help);
        }
    };
    add_sub("scan", "Raster scan of the (b,k) plane: grid CSV and heatmaps",
            {{"b_min", "Window"}, {"b_max", "Window"}, {"k_min", "Window"}, {"k_max", "Window"},
             {"nb", "Cells along b"}, {"nk", "Cells along k"}, {"n_transient", "Transient iterations"}});
    add_sub("sweep", "1D bifurcation diagram with absorbing-interval envelope",
            {{"axis", "b or k"}, {"fixed", "Value of the other parameter"}, {"lo", "Sweep start"}, {"hi", "Sweep end"},
             {"n_points", "Samples"}, {"n_plot", "Plotted points per seed"}});
    add_sub("curves", "Boundary curves, fold/flip continuation, intersections",
            {{"curves", "Curve ids, e.g. 'fold_5,fold_7'"}, {"b_min", "Seed window"}, {"b_max", "Seed window"},
             {"k_min", "Seed window"}, {"k_max", "Seed window"}, {"step", "Continuation step"}});
    add_sub("attractor", "Attractors reached from the two critical points",
            {{"b", "Parameter b"}, {"k", "Parameter k"}, {"n_transient", "Transient iterations"}});
    add_sub("period2", "The 2-cycle and its (u, B) parametrization", {{"b", "Parameter b"}, {"k", "Parameter k"}});
    add_sub("ode-poincare", "Poincare section of the predator-prey ODE",
            {{"m1", ""}, {"m2", ""}, {"lambda1", ""}, {"lambda2", ""}, {"a1", ""}, {"a2", ""},
             {"s_level", "Section level"}, {"n_events", "Events to record"}, {"tol", "Relative tolerance"},
             {"overlay_b", "Map overlay b"}, {"overlay_k", "Map overlay k"}});
    CLI::App* figures = app.add_subcommand("figures", "Run the bundled figure recipes");
    std::vector<std::string> only;
    std::string fig_out = "figures";
    bool list = false;
    figures->add_option("--only", only, "Recipe or figure name (fig3, fig5_scan, ...)");
    figures->add_option("--out", fig_out, "Output directory")->capture_default_str();
    figures->add_flag("--list", list, "Print the recipe names and exit");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    JobContext ctx;
    ctx.threads = threads == 0 ? default_threads() : threads;
    ctx.out = &out;
    ctx.err = &err;
    try {
        if (figures->parsed()) {
            if (list) {
                for (const Recipe& r : bundled_recipes()) out << r.name << '\n';
                return 0;
            }
            ctx.out_dir = fig_out;
            run_figures(only, ctx);
            return 0;
        }
        for (auto& [name, s] : subs) {
            if (!s.app->parsed()) continue;
            KeyValueConfig cfg = s.config.empty() ? KeyValueConfig::parse("", "<defaults>") : KeyValueConfig::load(s.config);
            cfg.apply_environment();
            for (const auto& [key, opt] : s.options) {
                if (opt->count() > 0) cfg.set(key, s.flags[key]);
            }
            ctx.out_dir = s.out_dir;
            ctx.stem = name;
            std::replace(ctx.stem.begin(), ctx.stem.end(), '-', '_');
            run_job(name, std::move(cfg), ctx);
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace bimodal::cli
