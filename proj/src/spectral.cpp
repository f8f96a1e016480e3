#include "polywell/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace polywell {

namespace {

constexpr double kPi = std::numbers::pi;

// Parity condition rearranged to a function of k' that is monotone on each
// tan/cot branch: even g = k' tan(k'w) - k, odd g = k' cot(k'w) + k,
// with k = sqrt(k_max^2 - k'^2).
double branch_function(double kp, double w, double k_max, Parity parity) {
    double k = std::sqrt(std::max(0.0, k_max * k_max - kp * kp));
    if (parity == Parity::Even) {
        return kp * std::tan(kp * w) - k;
    }
    return kp / std::tan(kp * w) + k;
}

double bisect_root(double lo, double hi, double w, double k_max, Parity parity) {
    double flo = branch_function(lo, w, k_max, parity);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * k_max; ++iter) {
        double mid = 0.5 * (lo + hi);
        double fmid = branch_function(mid, w, k_max, parity);
        if ((flo < 0.0) == (fmid < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BoundStateSet bound_states(double mass, double depth, double half_width) {
    if (!(mass > 0.0) || !(depth > 0.0) || !(half_width > 0.0)) {
        throw std::invalid_argument("bound_states: parameters must be > 0");
    }
    const double w = half_width;
    const double k_max = std::sqrt(2.0 * mass * depth);
    const double step = 0.5 * kPi / w;   // branch width in k'
    const double inset = 1e-12 * k_max;  // keeps brackets off the tan/cot poles

    BoundStateSet set{mass, depth, w, {}};
    // Branch j spans k'w in (j*pi/2, (j+1)*pi/2): even states for even j, odd
    // for odd j. On each branch the condition is monotone (even rises from -k
    // toward +inf, odd falls from +k toward -inf), so a sign change at the
    // bracket ends pins exactly one root.
    for (int j = 0; j * step < k_max; ++j) {
        Parity parity = (j % 2 == 0) ? Parity::Even : Parity::Odd;
        double lo = j * step + inset;
        double hi = std::min((j + 1) * step - inset, k_max * (1.0 - 1e-15));
        if (lo >= hi) continue;
        double flo = branch_function(lo, w, k_max, parity);
        double fhi = branch_function(hi, w, k_max, parity);
        if ((flo < 0.0) == (fhi < 0.0)) continue;
        double kp = bisect_root(lo, hi, w, k_max, parity);
        BoundState s;
        s.parity = parity;
        s.k_prime = kp;
        s.energy = kp * kp / (2.0 * mass) - depth;
        s.k = std::sqrt(std::max(0.0, k_max * k_max - kp * kp));
        set.states.push_back(s);
    }
    std::sort(set.states.begin(), set.states.end(),
              [](const BoundState& a, const BoundState& b) { return a.energy < b.energy; });
    for (std::size_t i = 0; i < set.states.size(); ++i) {
        set.states[i].n = static_cast<int>(i);
    }
    return set;
}

double bound_state_residual(const BoundState& s, double half_width) {
    if (s.parity == Parity::Even) {
        return std::abs(s.k_prime * std::tan(s.k_prime * half_width) - s.k);
    }
    return std::abs(s.k_prime / std::tan(s.k_prime * half_width) + s.k);
}

ResonanceDetuning resonance_detuning(double mass, double depth, double half_width) {
    if (!(mass > 0.0) || !(depth > 0.0) || !(half_width > 0.0)) {
        throw std::invalid_argument("resonance_detuning: parameters must be > 0");
    }
    double kw = std::sqrt(2.0 * mass * depth) * half_width;
    long n = std::lround(kw / (0.5 * kPi));
    if (n < 1) n = 1;
    ResonanceDetuning r;
    r.nearest_threshold = n * 0.5 * kPi;
    r.parity = (n % 2 == 0) ? Parity::Even : Parity::Odd;
    r.detuning = kw - r.nearest_threshold;
    return r;
}

double predicted_reflected_k(double width) {
    if (!(width > 0.0)) {
        throw std::invalid_argument("predicted_reflected_k: width must be > 0");
    }
    return kPi / (4.0 * width);
}

std::vector<DiscreteState> diagonalize_well(const PotentialSpec& spec, double mass,
                                            const Grid& grid) {
    std::vector<double> v = evaluate(spec, grid);
    const int m = grid.n_points - 2;   // interior nodes; walls pinned to zero
    const double kin = 1.0 / (mass * grid.dx * grid.dx);

    if (m < 3) {
        throw std::runtime_error("diagonalize_well: grid too small");
    }
    std::vector<double> diag(m), off(m - 1, -0.5 * kin);
    for (int i = 0; i < m; ++i) diag[i] = kin + v[i + 1];

    const double vl = *std::min_element(v.begin(), v.end()) - 1.0;
    const double vu = 0.0;

    // Pass 1: count the eigenvalues in (vl, 0]; pass 2: compute that many pairs.
    std::vector<double> d1 = diag, e1 = off, w_out(m);
    lapack_int found = 0;
    std::vector<lapack_int> isuppz(2 * std::max(1, m));
    lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'N', 'V', m, d1.data(), e1.data(),
                                     vl, vu, 0, 0, 0.0, &found, w_out.data(), nullptr, 1,
                                     isuppz.data());
    if (info != 0) {
        throw std::runtime_error("diagonalize_well: eigensolver failed (count pass)");
    }
    std::vector<DiscreteState> result;
    if (found == 0) return result;

    std::vector<double> d2 = diag, e2 = off, z(static_cast<std::size_t>(m) * found);
    info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'V', m, d2.data(), e2.data(), vl, vu, 0,
                          0, 0.0, &found, w_out.data(), z.data(), m, isuppz.data());
    if (info != 0) {
        throw std::runtime_error("diagonalize_well: eigensolver failed (vector pass)");
    }

    const double inv_sqrt_dx = 1.0 / std::sqrt(grid.dx);
    for (lapack_int s = 0; s < found; ++s) {
        if (!(w_out[s] < 0.0)) continue;
        DiscreteState ds;
        ds.energy = w_out[s];
        ds.eigenvector.assign(grid.n_points, 0.0);
        for (int i = 0; i < m; ++i) {
            // unit 2-norm -> unit integral |psi|^2 dx
            ds.eigenvector[i + 1] = z[static_cast<std::size_t>(s) * m + i] * inv_sqrt_dx;
        }
        if (std::abs(ds.eigenvector[1]) > 1e-8 ||
            std::abs(ds.eigenvector[grid.n_points - 2]) > 1e-8) {
            throw std::runtime_error(
                "diagonalize_well: grid too small (eigenvector not decayed at edges)");
        }
        result.push_back(std::move(ds));
    }
    return result;
}

}  // namespace polywell
