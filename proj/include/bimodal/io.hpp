#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bimodal/bifurcation.hpp"
#include "bimodal/ode.hpp"
#include "bimodal/orbit.hpp"
#include "bimodal/regions.hpp"
#include "bimodal/scan.hpp"

namespace bimodal {

/// printf-style %.{digits}g, or the shortest round-trip form for
/// digits <= 0. NaN and infinities become an empty field.
std::string format_number(double v, int digits = 0);

/// Comma-separated table with an optional leading '#' comment line.
struct CsvTable {
    std::string comment;  // without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
};

/// Throws ParseError when a row has the wrong field count or the header
/// differs from `expected_header` (when given).
CsvTable read_csv(std::istream& in, const std::vector<std::string>& expected_header = {});

/// Field converters used by the re-parsers; an empty field is nothing.
std::optional<double> parse_number(std::string_view field);
std::optional<long long> parse_integer(std::string_view field);

// Scan grid: "# key=value ..." then b,k,region,period1,period2,bistable,lyapunov.
// period codes: 0 chaotic, -1 unresolved; period2 is empty unless bistable.
inline const std::vector<std::string> kGridColumns{"b", "k", "region", "period1", "period2", "bistable", "lyapunov"};

void write_grid_csv(std::ostream& out, const ScanGrid& grid, const std::string& comment);

struct GridRow {
    MapParams p;
    RegionTag region = RegionTag::OutsideP;
    std::optional<int> period1;
    std::optional<int> period2;
    bool bistable = false;
    std::optional<double> lyapunov;
};

std::vector<GridRow> parse_grid_csv(std::istream& in);

// Attractor summaries: b,k,seed_tag,kind,period,lyapunov,points.
// Points are cycle points or band endpoints joined by ';'.
inline const std::vector<std::string> kAttractorColumns{"b", "k", "seed_tag", "kind", "period", "lyapunov", "points"};

struct AttractorRecord {
    MapParams p;
    std::string seed_tag;  // "max" or "min"
    AttractorKind kind = AttractorKind::Cycle;
    std::size_t period = 0;
    double lyapunov = 0.0;
    std::vector<double> points;
};

/// One row per critical seed.
std::vector<AttractorRecord> attractor_records(const MapParams& p, const AttractorSet& set);
void write_attractor_csv(std::ostream& out, const std::vector<AttractorRecord>& records);
std::vector<AttractorRecord> parse_attractor_csv(std::istream& in);

// Bifurcation curves: kind,n,b,k,x with 15 significant digits.
inline const std::vector<std::string> kCurveColumns{"kind", "n", "b", "k", "x"};

/// "fold_5", "flip_7", ...
std::string curve_id(const BifurcationCurve& curve);

void write_curves_csv(std::ostream& out, const std::vector<BifurcationCurve>& curves);
/// Consecutive rows with the same (kind, n) form one curve.
std::vector<BifurcationCurve> parse_curves_csv(std::istream& in);

struct IntersectionRecord {
    std::string first;
    std::string second;
    double b = 0.0;
    double k = 0.0;
};

/// JSON array of {"curves": [id, id], "b": .., "k": ..}.
void write_intersections_json(std::ostream& out, const std::vector<IntersectionRecord>& records);
std::vector<IntersectionRecord> parse_intersections_json(std::istream& in);

// Analytic boundary curves: curve_id,k,b.
inline const std::vector<std::string> kBoundaryColumns{"curve_id", "k", "b"};

void write_boundary_csv(std::ostream& out, const std::vector<BoundaryCurveSample>& samples);
std::vector<BoundaryCurveSample> parse_boundary_csv(std::istream& in);

// Sweep tails in long form: param,b,k,seed_tag,x.
inline const std::vector<std::string> kSweepColumns{"param", "b", "k", "seed_tag", "x"};
// Per-sample envelope: param,b,k,region,f_xmin,f_xmax,f2_xmin,f2_xmax,interval,lo,hi.
inline const std::vector<std::string> kEnvelopeColumns{"param", "b",       "k",        "region",   "f_xmin", "f_xmax",
                                                       "f2_xmin", "f2_xmax", "interval", "lo", "hi"};

void write_sweep_csv(std::ostream& out, const SweepDiagram& diagram, const std::string& comment);
void write_envelope_csv(std::ostream& out, const SweepDiagram& diagram, const std::string& comment);

// Section events: t,x,y1,y2,s.
inline const std::vector<std::string> kEventColumns{"t", "x", "y1", "y2", "s"};
// Return map: x,x_next and, with a map overlay, f(x).
inline const std::vector<std::string> kCloudColumns{"x", "x_next"};

void write_events_csv(std::ostream& out, const std::vector<SectionEvent>& events, const std::string& comment);
std::vector<SectionEvent> parse_events_csv(std::istream& in);
void write_cloud_csv(std::ostream& out, const std::vector<std::pair<double, double>>& cloud,
                     const std::optional<MapParams>& overlay, const std::string& comment);

}  // namespace bimodal
