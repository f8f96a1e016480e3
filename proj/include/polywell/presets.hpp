#pragma once

#include <string>
#include <vector>

#include "polywell/core.hpp"
#include "polywell/diagnostics.hpp"
#include "polywell/packets.hpp"
#include "polywell/potentials.hpp"

namespace polywell {

// A full run description: everything simulate/oracle needs, expressible as
// flat key=value pairs (see io.hpp) so runs are diffable and quotable.
struct RunConfig {
    int figure = 0;                  // 0 = custom parameters
    std::string mode = "simulate";   // "simulate" or "oracle"
    PacketSpec packet{PacketShape::Gaussian, 0.2, -10.0, 0.5};
    PotentialSpec well{WellShape::GaussianWell, 1.0, 1.0, 0.0};
    double mass = 20.0;
    double x_min = -900.0;
    double x_max = 900.0;
    double dx = 0.0;                 // 0 = resolution rule min(delta, w)/25
    double dt = 0.0;                 // 0 = resolution rule 2 m dx^2
    double t_max = 5000.0;
    std::vector<double> snapshot_times;   // empty = {t_max}
    double track_interval = 0.0;          // 0 = t_max/100
    double prominence = 0.1;
    double spacing_cov_max = 0.15;
    double envelope_residual_max = 1.0;
    std::string out_dir = ".";
};

// Resolved dx/dt after applying the resolution rule to zeros.
double resolved_dx(const RunConfig& config);
double resolved_dt(const RunConfig& config);

// Builds the grid from the config (resolution rule applied; node count chosen
// so the spacing matches the requested dx as closely as possible).
Grid make_grid(const RunConfig& config);

// Region boundaries for diagnostics: the well's width scale.
RegionSplit make_split(const RunConfig& config);

// Window for the interior standing-pattern wavenumber: the half-depth
// contour of the well (coincides with the full well for the square shape).
RegionSplit make_interior_split(const RunConfig& config);

ClassifyOptions make_classify_options(const RunConfig& config);

// Parameters behind the published figures 1 through 8. Common base:
// m=20, depth 1, width 1, x0=-10, Gaussian packet delta=0.5 on a Gaussian
// well; figure 6 uses m=11, figure 7 delta=2, figure 8 a square packet on a
// square well in oracle mode. Grid extents are sized so boundary reflections
// cannot reach the measurement region before t_max. Throws on figure
// outside 1..8.
RunConfig preset(int figure);

// Full consistency check: grid well-formed, packet resolved and clear of the
// edges, well not clipped, x0 inside the grid, positive times. Throws
// std::invalid_argument with a specific message on the first violation.
void validate(const RunConfig& config);

}  // namespace polywell
