#include "polywell/potentials.hpp"

#include <cmath>
#include <stdexcept>

namespace polywell {

std::vector<double> evaluate(const PotentialSpec& spec, const Grid& grid) {
    if (!(spec.depth > 0.0)) {
        throw std::invalid_argument("evaluate: depth must be > 0");
    }
    if (!(spec.width > 0.0)) {
        throw std::invalid_argument("evaluate: width must be > 0");
    }
    auto sample = [&](double x) -> double {
        double u = x - spec.center;
        switch (spec.shape) {
            case WellShape::GaussianWell:
                return -spec.depth * std::exp(-u * u / (spec.width * spec.width));
            case WellShape::SquareWell:
                return std::abs(u) <= spec.width ? -spec.depth : 0.0;
            case WellShape::LorentzianWell:
                return -spec.depth / (1.0 + (u / spec.width) * (u / spec.width));
        }
        return 0.0;
    };
    if (std::abs(sample(grid.x_min)) > 1e-10 * spec.depth ||
        std::abs(sample(grid.x_max)) > 1e-10 * spec.depth) {
        throw std::invalid_argument("evaluate: well clipped by grid edge");
    }
    std::vector<double> v(grid.n_points);
    for (int i = 0; i < grid.n_points; ++i) v[i] = sample(grid.x(i));
    return v;
}

}  // namespace polywell
