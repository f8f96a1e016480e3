#include "polywell/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace polywell {

double resolved_dx(const RunConfig& config) {
    if (config.dx > 0.0) return config.dx;
    return std::min(config.packet.width, config.well.width) / 25.0;
}

double resolved_dt(const RunConfig& config) {
    if (config.dt > 0.0) return config.dt;
    double dx = resolved_dx(config);
    return 2.0 * config.mass * dx * dx;
}

Grid make_grid(const RunConfig& config) {
    double dx = resolved_dx(config);
    if (!(dx > 0.0)) {
        throw std::invalid_argument("config: dx must be positive");
    }
    long n = std::lround((config.x_max - config.x_min) / dx) + 1;
    if (n < 3) {
        throw std::invalid_argument("config: grid has fewer than 3 nodes");
    }
    return Grid(config.x_min, config.x_max, static_cast<int>(n), resolved_dt(config));
}

RegionSplit make_split(const RunConfig& config) {
    return RegionSplit{-config.well.width, config.well.width};
}

RegionSplit make_interior_split(const RunConfig& config) {
    // Standing-pattern window: where the well retains at least half its depth,
    // so antinode spacings reflect the interior wavenumber rather than the
    // stretched local wavelength of a smooth well's skirts. Square: the full
    // well. Gaussian: |x| <= w sqrt(ln 2). Lorentzian: |x| <= w exactly.
    double r = config.well.width;
    if (config.well.shape == WellShape::GaussianWell) r *= std::sqrt(std::log(2.0));
    return RegionSplit{config.well.center - r, config.well.center + r};
}

ClassifyOptions make_classify_options(const RunConfig& config) {
    ClassifyOptions opts;
    opts.prominence = config.prominence;
    opts.spacing_cov_max = config.spacing_cov_max;
    opts.envelope_residual_max = config.envelope_residual_max;
    return opts;
}

RunConfig preset(int figure) {
    RunConfig c;
    c.figure = figure;
    // Common base; extents keep the edge nodes below the contamination
    // threshold through t_max. The far tail of a dispersing Gaussian packet
    // obeys |psi(x,t)|^2 ~ |a(m x / t)|^2 m / t with |a(p)|^2 the momentum
    // density, so the edge must sit beyond p* t_max / m where |a(p*)|^2 m /
    // t_max (times 4 for incident+reflected interference) drops under 1e-6.
    switch (figure) {
        case 1:
            c.packet.q = 0.2;
            c.x_min = -1150.0;
            c.x_max = 1150.0;
            break;
        case 2:
            c.packet.q = 0.6;
            c.x_min = -1250.0;
            c.x_max = 1250.0;
            break;
        case 3:
            c.packet.q = 1.4;
            c.x_min = -1450.0;
            c.x_max = 1450.0;
            break;
        case 4:
            c.packet.q = 2.2;
            c.x_min = -1650.0;
            c.x_max = 1650.0;
            break;
        case 5:
            c.packet.q = 1.0;
            c.t_max = 200.0;
            c.x_min = -60.0;
            c.x_max = 60.0;
            break;
        case 6:
            c.packet.q = 1.0;
            c.mass = 11.0;
            c.t_max = 200.0;
            c.x_min = -115.0;
            c.x_max = 115.0;
            break;
        case 7:
            c.packet.q = 1.0;
            c.packet.width = 2.0;
            c.x_min = -560.0;
            c.x_max = 560.0;
            break;
        case 8:
            // Analytic mode has no grid boundaries, so the extent is just the
            // evaluation window of the published plot, not a reflection-safe box.
            c.mode = "oracle";
            c.packet.shape = PacketShape::Square;
            c.packet.q = 1.0;
            c.packet.width = 0.5;
            c.well.shape = WellShape::SquareWell;
            c.t_max = 1000.0;
            c.x_min = -300.0;
            c.x_max = 100.0;
            c.dx = 0.05;
            break;
        default:
            throw std::invalid_argument("preset: figure must lie in 1..8, got " +
                                        std::to_string(figure));
    }
    c.snapshot_times = {c.t_max};
    return c;
}

void validate(const RunConfig& config) {
    if (config.mode != "simulate" && config.mode != "oracle") {
        throw std::invalid_argument("config: mode must be simulate or oracle");
    }
    if (!(config.mass > 0.0)) {
        throw std::invalid_argument("config: mass must be positive");
    }
    if (!(config.t_max >= 0.0)) {
        throw std::invalid_argument("config: t_max must be non-negative");
    }
    if (!(resolved_dt(config) > 0.0)) {
        throw std::invalid_argument("config: dt must be positive");
    }
    if (!(config.prominence > 0.0) || !(config.prominence < 1.0)) {
        throw std::invalid_argument("config: prominence must lie in (0, 1)");
    }
    if (!(config.spacing_cov_max > 0.0) || !(config.envelope_residual_max > 0.0)) {
        throw std::invalid_argument("config: classification thresholds must be positive");
    }
    if (config.track_interval < 0.0) {
        throw std::invalid_argument("config: track_interval must be non-negative");
    }
    for (double t : config.snapshot_times) {
        if (t < 0.0 || t > config.t_max) {
            throw std::invalid_argument("config: snapshot times must lie in [0, t_max]");
        }
    }
    Grid grid = make_grid(config);   // throws on malformed extent
    if (!(config.packet.x0 > grid.x_min) || !(config.packet.x0 < grid.x_max)) {
        throw std::invalid_argument("config: packet center lies outside the grid");
    }
    evaluate(config.well, grid);     // throws "well clipped"
    make_packet(grid, config.packet);   // throws on unresolved/clipped packet
    if (config.mode == "oracle") {
        if (config.packet.shape != PacketShape::Square ||
            config.well.shape != WellShape::SquareWell) {
            throw std::invalid_argument(
                "config: oracle mode needs a square packet and a square well");
        }
        if (!(config.packet.x0 + config.packet.width < -config.well.width)) {
            throw std::invalid_argument(
                "config: oracle mode needs the packet strictly left of the well");
        }
    }
}

}  // namespace polywell
