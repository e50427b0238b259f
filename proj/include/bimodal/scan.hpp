#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bimodal/orbit.hpp"
#include "bimodal/regions.hpp"

namespace bimodal {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Period code used in cell summaries: 0 = chaotic, -1 = unresolved.
inline constexpr int kChaoticPeriod = 0;
inline constexpr int kUnresolvedPeriod = -1;

struct CellSummary {
    RegionTag region = RegionTag::OutsideP;
    /// periods[0] follows the x_max seed, periods[1] the x_min seed (only
    /// when bistable). Empty outside P.
    std::vector<int> periods;
    bool bistable = false;
    bool unresolved = false;
    double lyapunov_max = 0.0;
};

struct ScanConfig {
    Interval b_range{-25.0, -0.5};
    Interval k_range{-60.0, -5.0};
    std::size_t nb = 1000;
    std::size_t nk = 1000;
    OrbitConfig orbit{};
    int threads = 1;
    /// Called with (rows_done, rows_total) from worker threads.
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Row-major grid: cells[j * nb + i] has center
/// (b_lo + (i + 1/2) db, k_lo + (j + 1/2) dk).
struct ScanGrid {
    Interval b_range;
    Interval k_range;
    std::size_t nb = 0;
    std::size_t nk = 0;
    std::vector<CellSummary> cells;

    MapParams center(std::size_t i, std::size_t j) const noexcept;
    const CellSummary& at(std::size_t i, std::size_t j) const { return cells.at(j * nb + i); }
    std::size_t unresolved_count() const noexcept;
};

/// Attractor summary of one parameter point.
CellSummary summarize_cell(const MapParams& p, const OrbitConfig& cfg = {});

/// Summaries for arbitrary parameter points, in order.
std::vector<CellSummary> scan_points(std::span<const MapParams> points, const OrbitConfig& cfg = {}, int threads = 1);

ScanGrid scan(const ScanConfig& cfg);

enum class SweepAxis { B, K };

struct SweepSample {
    double param = 0.0;
    MapParams p;
    std::vector<double> tail_max;  // orbit of x_max after the transient
    std::vector<double> tail_min;  // orbit of x_min
    /// f(x_min), f(x_max), f^2(x_min), f^2(x_max) when extrema exist.
    std::optional<std::array<double, 4>> endpoints;
    std::optional<AbsorbingInterval> interval;
    RegionTag region = RegionTag::OutsideP;
};

struct SweepDiagram {
    SweepAxis axis = SweepAxis::B;
    double fixed_value = 0.0;
    std::vector<SweepSample> samples;
};

struct SweepConfig {
    SweepAxis axis = SweepAxis::B;
    double fixed_value = -40.0;
    Interval range{-39.9, -0.1};
    std::size_t n_points = 1000;
    std::size_t n_plot = 200;
    std::size_t n_transient = OrbitDefaults::n_transient;
    int threads = 1;
};

/// 1D parameter sweep with both critical orbits and the absorbing-interval
/// candidates at every sample. Points outside P keep an empty tail.
SweepDiagram sweep(const SweepConfig& cfg);

enum class HeatmapChannel { Period, Bistable, Lyapunov };

HeatmapChannel heatmap_channel_from_string(std::string_view name);
std::string_view to_string(HeatmapChannel channel) noexcept;

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Fixed palette: periods 1..16, chaos, long periods, unresolved,
/// outside-P and the bistable marker.
struct Palette {
    static Rgb period(int period) noexcept;
    static constexpr Rgb chaos{0, 0, 0};
    static constexpr Rgb long_period{90, 90, 140};
    static constexpr Rgb unresolved{128, 128, 128};
    static constexpr Rgb outside{255, 255, 255};
    static constexpr Rgb bistable{255, 0, 255};
    static constexpr Rgb monostable{220, 220, 220};
};

Rgb cell_color(const CellSummary& cell, HeatmapChannel channel) noexcept;

/// Writes a binary P6 pixmap (top row = largest k) and `<path>.json` with
/// the legend. Throws std::filesystem::filesystem_error on IO failure.
void render_heatmap(const ScanGrid& grid, HeatmapChannel channel, const std::filesystem::path& path);

}  // namespace bimodal
