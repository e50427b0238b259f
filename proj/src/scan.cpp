#include "bimodal/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>

#include <json.hpp>

#include "bimodal/errors.hpp"
#include "bimodal/parallel.hpp"

namespace bimodal {

namespace {

double cell_center(const Interval& r, std::size_t i, std::size_t n) noexcept
{
    return r.lo + (static_cast<double>(i) + 0.5) * (r.hi - r.lo) / static_cast<double>(n);
}

// Tableau-like, distinct at a glance; index = period - 1.
constexpr std::array<Rgb, 16> kPeriodColors{{
    {31, 119, 180},  {255, 127, 14},  {44, 160, 44},   {214, 39, 40},
    {148, 103, 189}, {140, 86, 75},   {227, 119, 194}, {188, 189, 34},
    {23, 190, 207},  {174, 199, 232}, {255, 187, 120}, {152, 223, 138},
    {255, 152, 150}, {197, 176, 213}, {196, 156, 148}, {219, 219, 141},
}};

std::string hex(const Rgb& c)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

[[noreturn]] void io_failure(const std::filesystem::path& path, const char* what)
{
    throw std::filesystem::filesystem_error(what, path, std::make_error_code(std::errc::io_error));
}

}  // namespace

MapParams ScanGrid::center(std::size_t i, std::size_t j) const noexcept
{
    return {cell_center(b_range, i, nb), cell_center(k_range, j, nk)};
}

std::size_t ScanGrid::unresolved_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const CellSummary& c) { return c.unresolved; }));
}

CellSummary summarize_cell(const MapParams& p, const OrbitConfig& cfg)
{
    CellSummary cell;
    cell.region = classify(p);
    if (cell.region == RegionTag::OutsideP) {
        cell.lyapunov_max = std::numeric_limits<double>::quiet_NaN();
        return cell;
    }
    if (cell.region == RegionTag::FixedPointStable) {
        // Globally attracting fixed point; no iteration needed.
        cell.periods = {1};
        cell.lyapunov_max = std::log(std::abs(derivative(p, fixed_point(p), 1)));
        return cell;
    }
    try {
        const AttractorSet set = attractor_set(p, cfg);
        cell.bistable = set.bistable;
        cell.lyapunov_max = -std::numeric_limits<double>::infinity();
        for (const Attractor& a : set.attractors) {
            cell.periods.push_back(a.kind == AttractorKind::Chaotic ? kChaoticPeriod : static_cast<int>(a.period));
            cell.lyapunov_max = std::max(cell.lyapunov_max, a.lyapunov);
        }
    } catch (const UnresolvedAttractor& e) {
        cell.unresolved = true;
        cell.periods = {kUnresolvedPeriod};
        cell.lyapunov_max = e.lyapunov();
    }
    return cell;
}

std::vector<CellSummary> scan_points(std::span<const MapParams> points, const OrbitConfig& cfg, int threads)
{
    std::vector<CellSummary> out(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) { out[i] = summarize_cell(points[i], cfg); });
    return out;
}

ScanGrid scan(const ScanConfig& cfg)
{
    if (cfg.nb == 0 || cfg.nk == 0 || !(cfg.b_range.lo < cfg.b_range.hi) || !(cfg.k_range.lo < cfg.k_range.hi)) {
        throw DomainError("scan needs nb, nk > 0 and non-empty ranges");
    }
    ScanGrid grid;
    grid.b_range = cfg.b_range;
    grid.k_range = cfg.k_range;
    grid.nb = cfg.nb;
    grid.nk = cfg.nk;
    grid.cells.resize(cfg.nb * cfg.nk);
    std::atomic<std::size_t> rows_done{0};
    parallel_for(cfg.nk, cfg.threads, [&](std::size_t j) {
        for (std::size_t i = 0; i < cfg.nb; ++i) {
            grid.cells[j * cfg.nb + i] = summarize_cell(grid.center(i, j), cfg.orbit);
        }
        const std::size_t done = ++rows_done;
        if (cfg.progress) cfg.progress(done, cfg.nk);
    });
    return grid;
}

SweepDiagram sweep(const SweepConfig& cfg)
{
    if (cfg.n_points < 2 || !(cfg.range.lo < cfg.range.hi)) {
        throw DomainError("sweep needs at least two points and a non-empty range");
    }
    SweepDiagram diagram;
    diagram.axis = cfg.axis;
    diagram.fixed_value = cfg.fixed_value;
    diagram.samples.resize(cfg.n_points);
    parallel_for(cfg.n_points, cfg.threads, [&](std::size_t i) {
        SweepSample& s = diagram.samples[i];
        s.param = cfg.range.lo + (cfg.range.hi - cfg.range.lo) * static_cast<double>(i) / static_cast<double>(cfg.n_points - 1);
        s.p = cfg.axis == SweepAxis::B ? MapParams{s.param, cfg.fixed_value} : MapParams{cfg.fixed_value, s.param};
        s.region = classify(s.p);
        if (s.p.k < -4.0) {
            const auto [x_max, x_min] = critical_abscissae(s.p.k);
            const double f_min = eval(s.p, x_min);
            const double f_max = eval(s.p, x_max);
            s.endpoints = std::array<double, 4>{f_min, f_max, eval(s.p, f_min), eval(s.p, f_max)};
            if (s.region != RegionTag::OutsideP) {
                s.tail_max = iterate(s.p, x_max, cfg.n_transient, cfg.n_plot).tail;
                s.tail_min = iterate(s.p, x_min, cfg.n_transient, cfg.n_plot).tail;
            }
            if (s.region != RegionTag::OutsideP && s.region != RegionTag::FixedPointStable) {
                s.interval = absorbing_interval(s.p);
            }
        } else if (s.region != RegionTag::OutsideP) {
            // Monotone map: every orbit tends to x*.
            s.tail_max = iterate(s.p, 0.0, cfg.n_transient, cfg.n_plot).tail;
        }
    });
    return diagram;
}

HeatmapChannel heatmap_channel_from_string(std::string_view name)
{
    if (name == "period") return HeatmapChannel::Period;
    if (name == "bistable") return HeatmapChannel::Bistable;
    if (name == "lyapunov") return HeatmapChannel::Lyapunov;
    throw DomainError("unknown heatmap channel '" + std::string(name) + "'");
}

std::string_view to_string(HeatmapChannel channel) noexcept
{
    switch (channel) {
    case HeatmapChannel::Period: return "period";
    case HeatmapChannel::Bistable: return "bistable";
    case HeatmapChannel::Lyapunov: return "lyapunov";
    }
    return "?";
}

Rgb Palette::period(int period) noexcept
{
    if (period == kChaoticPeriod) return chaos;
    if (period < 0) return unresolved;
    if (period > static_cast<int>(kPeriodColors.size())) return long_period;
    return kPeriodColors[static_cast<std::size_t>(period - 1)];
}

Rgb cell_color(const CellSummary& cell, HeatmapChannel channel) noexcept
{
    if (cell.region == RegionTag::OutsideP) return Palette::outside;
    if (cell.unresolved) return Palette::unresolved;
    switch (channel) {
    case HeatmapChannel::Period:
        if (cell.bistable) return Palette::bistable;
        return Palette::period(cell.periods.empty() ? kUnresolvedPeriod : cell.periods.front());
    case HeatmapChannel::Bistable:
        return cell.bistable ? Palette::bistable : Palette::monostable;
    case HeatmapChannel::Lyapunov: {
        const double l = cell.lyapunov_max;
        if (!std::isfinite(l)) return Palette::unresolved;
        const double t = std::min(1.0, std::abs(l));
        const auto ramp = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)));
        return l <= 0.0 ? Rgb{0, ramp, 255} : Rgb{255, ramp, 0};
    }
    }
    return Palette::unresolved;
}

void render_heatmap(const ScanGrid& grid, HeatmapChannel channel, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) io_failure(path, "cannot open heatmap for writing");
    out << "P6\n" << grid.nb << ' ' << grid.nk << "\n255\n";
    std::vector<char> row(3 * grid.nb);
    for (std::size_t jj = 0; jj < grid.nk; ++jj) {
        const std::size_t j = grid.nk - 1 - jj;
        for (std::size_t i = 0; i < grid.nb; ++i) {
            const Rgb c = cell_color(grid.at(i, j), channel);
            row[3 * i] = static_cast<char>(c.r);
            row[3 * i + 1] = static_cast<char>(c.g);
            row[3 * i + 2] = static_cast<char>(c.b);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) io_failure(path, "write failed");
    out.close();

    nlohmann::ordered_json legend;
    legend["image"] = path.filename().string();
    legend["channel"] = std::string(to_string(channel));
    legend["width"] = grid.nb;
    legend["height"] = grid.nk;
    legend["b_range"] = {grid.b_range.lo, grid.b_range.hi};
    legend["k_range"] = {grid.k_range.lo, grid.k_range.hi};
    legend["orientation"] = "column i -> b ascending left to right; top row = largest k";
    nlohmann::ordered_json colors;
    colors["outside_P"] = hex(Palette::outside);
    colors["unresolved"] = hex(Palette::unresolved);
    switch (channel) {
    case HeatmapChannel::Period:
        for (int p = 1; p <= 16; ++p) colors["period_" + std::to_string(p)] = hex(Palette::period(p));
        colors["period_above_16"] = hex(Palette::long_period);
        colors["chaotic"] = hex(Palette::chaos);
        colors["bistable"] = hex(Palette::bistable);
        break;
    case HeatmapChannel::Bistable:
        colors["bistable"] = hex(Palette::bistable);
        colors["single_attractor"] = hex(Palette::monostable);
        break;
    case HeatmapChannel::Lyapunov:
        colors["lyapunov_-1_or_less"] = hex(Rgb{0, 0, 255});
        colors["lyapunov_0_from_below"] = hex(Rgb{0, 255, 255});
        colors["lyapunov_0_from_above"] = hex(Rgb{255, 255, 0});
        colors["lyapunov_1_or_more"] = hex(Rgb{255, 0, 0});
        colors["ramp"] = "linear in |lyapunov| clipped to 1";
        break;
    }
    legend["colors"] = colors;
    legend["unresolved_cells"] = grid.unresolved_count();

    std::filesystem::path legend_path = path;
    legend_path += ".json";
    std::ofstream lj(legend_path);
    if (!lj) io_failure(legend_path, "cannot open legend for writing");
    lj << legend.dump(2) << '\n';
    if (!lj) io_failure(legend_path, "write failed");
}

}  // namespace bimodal
