#include "polywell/packets.hpp"

#include <cmath>
#include <stdexcept>

namespace polywell {

namespace {

void validate(const Grid& grid, const PacketSpec& spec) {
    if (!(spec.width > 0.0)) {
        throw std::invalid_argument("make_packet: width must be > 0");
    }
    if (grid.dx > spec.width / 10.0) {
        throw std::invalid_argument("make_packet: under-resolved (dx > width/10)");
    }
    double clear_lo = spec.x0 - grid.x_min;
    double clear_hi = grid.x_max - spec.x0;
    if (clear_lo < 5.0 * spec.width || clear_hi < 5.0 * spec.width) {
        throw std::invalid_argument(
            "make_packet: x0 needs at least 5 widths of clearance from both edges");
    }
    if (spec.shape == PacketShape::Gaussian) {
        // |psi|^2 is Gaussian with standard deviation width; the mass beyond a
        // distance L from the center is erfc(L / (sqrt(2) width)) / 2 per side.
        double tail = 0.5 * std::erfc(clear_lo / (std::sqrt(2.0) * spec.width)) +
                      0.5 * std::erfc(clear_hi / (std::sqrt(2.0) * spec.width));
        if (tail > 1e-10) {
            throw std::invalid_argument("make_packet: edge clipping (Gaussian tail)");
        }
    }
    if (spec.shape == PacketShape::Square) {
        if (spec.x0 - spec.width <= grid.x_min || spec.x0 + spec.width >= grid.x_max) {
            throw std::invalid_argument("make_packet: edge clipping (square support)");
        }
    }
}

}  // namespace

WaveFunction make_packet(const Grid& grid, const PacketSpec& spec) {
    validate(grid, spec);
    WaveFunction psi(grid);
    const cplx iq(0.0, spec.q);
    switch (spec.shape) {
        case PacketShape::Gaussian:
            for (int i = 0; i < grid.n_points; ++i) {
                double u = grid.x(i) - spec.x0;
                psi.values[i] =
                    std::exp(iq * u - u * u / (4.0 * spec.width * spec.width));
            }
            break;
        case PacketShape::Square: {
            for (int i = 0; i < grid.n_points; ++i) {
                double u = grid.x(i) - spec.x0;
                psi.values[i] = std::abs(u) <= spec.width ? std::exp(iq * u) : cplx{};
            }
            // the node nearest each support edge takes the interior value
            for (double edge : {spec.x0 - spec.width, spec.x0 + spec.width}) {
                int j = static_cast<int>(std::lround((edge - grid.x_min) / grid.dx));
                if (j >= 0 && j < grid.n_points) {
                    psi.values[j] = std::exp(iq * (grid.x(j) - spec.x0));
                }
            }
            break;
        }
        case PacketShape::Lorentzian:
            for (int i = 0; i < grid.n_points; ++i) {
                double u = (grid.x(i) - spec.x0) / spec.width;
                psi.values[i] = std::exp(iq * (grid.x(i) - spec.x0)) / (1.0 + u * u);
            }
            break;
        case PacketShape::LinearExponential:
            for (int i = 0; i < grid.n_points; ++i) {
                double u = grid.x(i) - spec.x0;
                psi.values[i] = std::exp(iq * u - std::abs(u) / spec.width);
            }
            break;
    }
    normalize(psi);
    return psi;
}

double momentum_expectation(const WaveFunction& psi) {
    const Grid& g = psi.grid;
    const auto& v = psi.values;
    // integrand Im(conj(psi) dpsi/dx); centered differences inside, one-sided ends
    auto deriv = [&](int i) {
        if (i == 0) return (v[1] - v[0]) / g.dx;
        if (i == g.n_points - 1) return (v[i] - v[i - 1]) / g.dx;
        return (v[i + 1] - v[i - 1]) / (2.0 * g.dx);
    };
    double total = 0.0;
    double prev = std::imag(std::conj(v[0]) * deriv(0));
    for (int i = 1; i < g.n_points; ++i) {
        double cur = std::imag(std::conj(v[i]) * deriv(i));
        total += g.dx * 0.5 * (prev + cur);
        prev = cur;
    }
    return total;
}

}  // namespace polywell
