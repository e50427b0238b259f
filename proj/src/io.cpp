#include "bimodal/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "bimodal/errors.hpp"

namespace bimodal {

namespace {

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (;;) {
        const std::size_t next = line.find(sep, pos);
        out.emplace_back(line.substr(pos, next - pos));
        if (next == std::string_view::npos) return out;
        pos = next + 1;
    }
}

std::string join(const std::vector<std::string>& fields, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += sep;
        out += fields[i];
    }
    return out;
}

void write_header(std::ostream& out, const std::string& comment, const std::vector<std::string>& columns)
{
    if (!comment.empty()) out << "# " << comment << '\n';
    out << join(columns, ',') << '\n';
}

[[noreturn]] void bad_field(std::size_t row, std::string_view column, std::string_view value)
{
    throw ParseError("row " + std::to_string(row + 1) + ", column '" + std::string(column) + "': bad value '" +
                     std::string(value) + "'");
}

double need_number(const CsvTable& t, std::size_t row, std::size_t col)
{
    const auto v = parse_number(t.rows[row][col]);
    if (!v) bad_field(row, t.header[col], t.rows[row][col]);
    return *v;
}

long long need_integer(const CsvTable& t, std::size_t row, std::size_t col)
{
    const auto v = parse_integer(t.rows[row][col]);
    if (!v) bad_field(row, t.header[col], t.rows[row][col]);
    return *v;
}

AttractorKind attractor_kind_from_string(std::string_view name)
{
    for (AttractorKind k : {AttractorKind::FixedPoint, AttractorKind::Cycle, AttractorKind::Chaotic, AttractorKind::Divergent}) {
        if (to_string(k) == name) return k;
    }
    throw ParseError("unknown attractor kind '" + std::string(name) + "'");
}

BoundaryCurve boundary_curve_from_string(std::string_view name)
{
    for (BoundaryCurve c : {BoundaryCurve::Eta1Flip, BoundaryCurve::Gamma1, BoundaryCurve::Gamma2}) {
        if (to_string(c) == name) return c;
    }
    throw ParseError("unknown boundary curve '" + std::string(name) + "'");
}

BifurcationKind bifurcation_kind_from_string(std::string_view name)
{
    if (name == "fold") return BifurcationKind::Fold;
    if (name == "flip") return BifurcationKind::Flip;
    throw ParseError("unknown bifurcation kind '" + std::string(name) + "'");
}

std::string period_field(const std::vector<int>& periods, std::size_t i)
{
    return i < periods.size() ? std::to_string(periods[i]) : std::string();
}

}  // namespace

std::string format_number(double v, int digits)
{
    if (!std::isfinite(v)) return {};
    char buf[40];
    if (digits <= 0) {
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::optional<double> parse_number(std::string_view field)
{
    if (field.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_integer(std::string_view field)
{
    if (field.empty()) return std::nullopt;
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
    return v;
}

std::size_t CsvTable::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ParseError("missing column '" + std::string(name) + "'");
}

CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected_header)
{
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!have_header) {
            if (line.rfind("# ", 0) == 0 && table.comment.empty()) {
                table.comment = line.substr(2);
                continue;
            }
            table.header = split(line, ',');
            have_header = true;
            if (!expected_header.empty() && table.header != expected_header) {
                throw ParseError("unexpected header '" + line + "', expected '" + join(expected_header, ',') + "'");
            }
            continue;
        }
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != table.header.size()) {
            throw ParseError("row " + std::to_string(table.rows.size() + 1) + ": " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (!have_header) throw ParseError("missing header line");
    return table;
}

void write_grid_csv(std::ostream& out, const ScanGrid& grid, const std::string& comment)
{
    write_header(out, comment, kGridColumns);
    for (std::size_t j = 0; j < grid.nk; ++j) {
        for (std::size_t i = 0; i < grid.nb; ++i) {
            const CellSummary& c = grid.at(i, j);
            const MapParams p = grid.center(i, j);
            out << format_number(p.b) << ',' << format_number(p.k) << ',' << to_string(c.region) << ','
                << period_field(c.periods, 0) << ',' << (c.bistable ? period_field(c.periods, 1) : std::string()) << ','
                << (c.bistable ? 1 : 0) << ',' << format_number(c.lyapunov_max, 12) << '\n';
        }
    }
}

std::vector<GridRow> parse_grid_csv(std::istream& in)
{
    const CsvTable t = read_csv(in, kGridColumns);
    std::vector<GridRow> rows(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        GridRow& g = rows[r];
        g.p = {need_number(t, r, 0), need_number(t, r, 1)};
        try {
            g.region = region_from_string(t.rows[r][2]);
        } catch (const DomainError&) {
            bad_field(r, "region", t.rows[r][2]);
        }
        for (std::size_t col : {3u, 4u}) {
            if (t.rows[r][col].empty()) continue;
            const auto v = static_cast<int>(need_integer(t, r, col));
            (col == 3 ? g.period1 : g.period2) = v;
        }
        const long long bi = need_integer(t, r, 5);
        if (bi != 0 && bi != 1) bad_field(r, "bistable", t.rows[r][5]);
        g.bistable = bi == 1;
        if (g.bistable != g.period2.has_value()) bad_field(r, "period2", t.rows[r][4]);
        if (!t.rows[r][6].empty()) g.lyapunov = need_number(t, r, 6);
    }
    return rows;
}

std::vector<AttractorRecord> attractor_records(const MapParams& p, const AttractorSet& set)
{
    std::vector<AttractorRecord> out;
    const char* tags[2] = {"max", "min"};
    for (std::size_t s = 0; s < set.seed_owner.size() && s < 2; ++s) {
        const Attractor& a = set.attractors.at(set.seed_owner[s]);
        out.push_back({p, tags[s], a.kind, a.period, a.lyapunov, a.points});
    }
    return out;
}

void write_attractor_csv(std::ostream& out, const std::vector<AttractorRecord>& records)
{
    write_header(out, "", kAttractorColumns);
    for (const AttractorRecord& r : records) {
        std::vector<std::string> pts;
        pts.reserve(r.points.size());
        for (double x : r.points) pts.push_back(format_number(x, 12));
        out << format_number(r.p.b) << ',' << format_number(r.p.k) << ',' << r.seed_tag << ',' << to_string(r.kind)
            << ',' << r.period << ',' << format_number(r.lyapunov, 12) << ',' << join(pts, ';') << '\n';
    }
}

std::vector<AttractorRecord> parse_attractor_csv(std::istream& in)
{
    const CsvTable t = read_csv(in, kAttractorColumns);
    std::vector<AttractorRecord> out(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        AttractorRecord& a = out[r];
        a.p = {need_number(t, r, 0), need_number(t, r, 1)};
        a.seed_tag = t.rows[r][2];
        if (a.seed_tag != "max" && a.seed_tag != "min") bad_field(r, "seed_tag", a.seed_tag);
        a.kind = attractor_kind_from_string(t.rows[r][3]);
        const long long period = need_integer(t, r, 4);
        if (period < 0) bad_field(r, "period", t.rows[r][4]);
        a.period = static_cast<std::size_t>(period);
        a.lyapunov = parse_number(t.rows[r][5]).value_or(std::nan(""));
        if (!t.rows[r][6].empty()) {
            for (const std::string& f : split(t.rows[r][6], ';')) {
                const auto v = parse_number(f);
                if (!v) bad_field(r, "points", f);
                a.points.push_back(*v);
            }
        }
    }
    return out;
}

std::string curve_id(const BifurcationCurve& curve)
{
    return std::string(to_string(curve.kind)) + "_" + std::to_string(curve.n);
}

void write_curves_csv(std::ostream& out, const std::vector<BifurcationCurve>& curves)
{
    write_header(out, "", kCurveColumns);
    for (const BifurcationCurve& c : curves) {
        for (const BifurcationPoint& pt : c.points) {
            out << to_string(c.kind) << ',' << c.n << ',' << format_number(pt.b, 15) << ',' << format_number(pt.k, 15)
                << ',' << format_number(pt.x, 15) << '\n';
        }
    }
}

std::vector<BifurcationCurve> parse_curves_csv(std::istream& in)
{
    const CsvTable t = read_csv(in, kCurveColumns);
    std::vector<BifurcationCurve> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const BifurcationKind kind = bifurcation_kind_from_string(t.rows[r][0]);
        const long long n = need_integer(t, r, 1);
        if (n < 1) bad_field(r, "n", t.rows[r][1]);
        if (out.empty() || out.back().kind != kind || out.back().n != n) {
            out.push_back({});
            out.back().kind = kind;
            out.back().n = static_cast<int>(n);
        }
        out.back().points.push_back(
            {need_number(t, r, 2), need_number(t, r, 3), need_number(t, r, 4), static_cast<int>(n), kind});
    }
    return out;
}

void write_intersections_json(std::ostream& out, const std::vector<IntersectionRecord>& records)
{
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const IntersectionRecord& r : records) {
        nlohmann::ordered_json rec;
        rec["curves"] = {r.first, r.second};
        rec["b"] = r.b;
        rec["k"] = r.k;
        arr.push_back(rec);
    }
    out << arr.dump(2) << '\n';
}

std::vector<IntersectionRecord> parse_intersections_json(std::istream& in)
{
    std::vector<IntersectionRecord> out;
    try {
        const nlohmann::json arr = nlohmann::json::parse(in);
        if (!arr.is_array()) throw ParseError("intersections: expected a JSON array");
        for (const auto& rec : arr) {
            const auto& ids = rec.at("curves");
            if (!ids.is_array() || ids.size() != 2) throw ParseError("intersections: 'curves' needs two ids");
            out.push_back({ids[0].get<std::string>(), ids[1].get<std::string>(), rec.at("b").get<double>(),
                           rec.at("k").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("intersections: ") + e.what());
    }
    return out;
}

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryCurveSample>& samples)
{
    write_header(out, "", kBoundaryColumns);
    for (const BoundaryCurveSample& s : samples) {
        out << to_string(s.curve_id) << ',' << format_number(s.k, 15) << ',' << format_number(s.b, 15) << '\n';
    }
}

std::vector<BoundaryCurveSample> parse_boundary_csv(std::istream& in)
{
    const CsvTable t = read_csv(in, kBoundaryColumns);
    std::vector<BoundaryCurveSample> out(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out[r] = {need_number(t, r, 1), need_number(t, r, 2), boundary_curve_from_string(t.rows[r][0])};
    }
    return out;
}

void write_sweep_csv(std::ostream& out, const SweepDiagram& diagram, const std::string& comment)
{
    write_header(out, comment, kSweepColumns);
    for (const SweepSample& s : diagram.samples) {
        const std::string prefix = format_number(s.param) + ',' + format_number(s.p.b) + ',' + format_number(s.p.k) + ',';
        for (double x : s.tail_max) out << prefix << "max," << format_number(x) << '\n';
        for (double x : s.tail_min) out << prefix << "min," << format_number(x) << '\n';
    }
}

void write_envelope_csv(std::ostream& out, const SweepDiagram& diagram, const std::string& comment)
{
    write_header(out, comment, kEnvelopeColumns);
    for (const SweepSample& s : diagram.samples) {
        out << format_number(s.param) << ',' << format_number(s.p.b) << ',' << format_number(s.p.k) << ','
            << to_string(s.region);
        for (int i = 0; i < 4; ++i) out << ',' << (s.endpoints ? format_number((*s.endpoints)[static_cast<std::size_t>(i)]) : "");
        if (s.interval) {
            out << ',' << to_string(s.interval->kind) << ',' << format_number(s.interval->lo) << ','
                << format_number(s.interval->hi) << '\n';
        } else {
            out << ",,,\n";
        }
    }
}

void write_events_csv(std::ostream& out, const std::vector<SectionEvent>& events, const std::string& comment)
{
    write_header(out, comment, kEventColumns);
    for (const SectionEvent& e : events) {
        out << format_number(e.t) << ',' << format_number(e.x) << ',' << format_number(e.state.y1) << ','
            << format_number(e.state.y2) << ',' << format_number(e.state.s) << '\n';
    }
}

std::vector<SectionEvent> parse_events_csv(std::istream& in)
{
    const CsvTable t = read_csv(in, kEventColumns);
    std::vector<SectionEvent> out(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out[r].t = need_number(t, r, 0);
        out[r].x = need_number(t, r, 1);
        out[r].state = {need_number(t, r, 2), need_number(t, r, 3), need_number(t, r, 4)};
    }
    return out;
}

void write_cloud_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cloud,
                     const std::optional<MapParams>& overlay, const std::string& comment)
{
    std::vector<std::string> columns = kCloudColumns;
    if (overlay) columns.push_back("f_x");
    write_header(out, comment, columns);
    for (const auto& [x, y] : cloud) {
        out << format_number(x) << ',' << format_number(y);
        if (overlay) out << ',' << format_number(eval(*overlay, x));
        out << '\n';
    }
}

}  // namespace bimodal
