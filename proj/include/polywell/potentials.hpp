#pragma once

#include "polywell/core.hpp"

#include <vector>

namespace polywell {

enum class WellShape { GaussianWell, SquareWell, LorentzianWell };

// Attractive wells only: depth > 0 and V(x) <= 0 everywhere.
// width is the Gaussian/Lorentzian scale, or the square half-width.
struct PotentialSpec {
    WellShape shape = WellShape::GaussianWell;
    double depth = 1.0;
    double width = 1.0;
    double center = 0.0;
};

// Sample V on the grid. Shapes, u = x - center:
//   GaussianWell:   -depth * exp(-u^2 / width^2)
//   SquareWell:     -depth for |u| <= width (node exactly on the edge takes the
//                   inside value), else 0
//   LorentzianWell: -depth / (1 + (u/width)^2)
// Throws "well clipped" when |V| at either grid edge exceeds 1e-10 * depth.
std::vector<double> evaluate(const PotentialSpec& spec, const Grid& grid);

}  // namespace polywell
