#pragma once

#include "polywell/core.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace polywell {

// Optional complex-absorbing margin at both grid edges. Off by default; when on,
// a quadratic imaginary ramp -i*strength*((s - margin)/margin)^2 is added over the
// outermost `margin_width` of the domain. Absorbing runs are not unitary.
struct CapSpec {
    bool enabled = false;
    double margin_width = 0.0;
    double strength = 0.0;
};

// One Cayley/Crank-Nicolson step: (1 + i H dt/2) psi(t+dt) = (1 - i H dt/2) psi(t)
// with H psi_i = -(psi_{i+1} - 2 psi_i + psi_{i-1}) / (2 m dx^2) + V_i psi_i and
// Dirichlet psi = 0 at both edges. The tridiagonal solve is the standard
// forward-elimination/back-substitution, O(n) per step; elimination coefficients
// are precomputed once since the matrix is time-independent.
class Propagator {
  public:
    Propagator(const Grid& grid, std::vector<double> potential, PhysicalParams params,
               CapSpec cap = {});

    // Advances psi by one dt in place and increments psi.time.
    // Throws "diverged" when amplitudes stop being finite.
    void step(WaveFunction& psi);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& potential() const { return potential_; }
    double dt() const { return grid_.dt; }

  private:
    Grid grid_;
    std::vector<double> potential_;
    PhysicalParams params_;
    std::vector<cplx> diag_b_;      // RHS diagonal: 1 - i dt/2 (kin + V_i)
    std::vector<cplx> elim_c_;      // precomputed forward-elimination multipliers
    std::vector<cplx> elim_inv_;    // precomputed pivot inverses
    std::vector<cplx> scratch_;
    cplx off_a_;                    // LHS off-diagonal
    cplx off_b_;                    // RHS off-diagonal
};

struct RunOptions {
    std::vector<double> snapshot_times;      // sorted, <= t_max; mapped to nearest step
    bool abort_on_contamination = true;
    double contamination_threshold = 1e-6;   // on |psi|^2 within edge_margin_nodes of an edge
    int edge_margin_nodes = 5;
    double norm_invalid_tolerance = 1e-4;    // |norm - 1| beyond this flags the run invalid
    int norm_sample_interval = 100;          // steps between norm-log entries
    int observer_interval = 0;               // steps between observer calls; 0 disables
    std::function<void(const WaveFunction&)> observer;
    CapSpec cap;
};

struct RunResult {
    WaveFunction final_state;
    std::vector<WaveFunction> snapshots;
    std::vector<std::pair<double, double>> norm_log;   // (time, norm)
    double first_contamination_time = -1.0;            // < 0: never contaminated
    bool aborted_on_contamination = false;
    bool norm_valid = true;
    long long steps = 0;
};

// Drives Propagator::step for round(t_max/dt) steps. Snapshot times map to the
// nearest step. Boundary contamination (|psi|^2 above the threshold within the
// edge margin) is recorded at first occurrence and, by default, aborts the run
// with a warning flag rather than an exception.
RunResult run(const WaveFunction& initial, const std::vector<double>& potential,
              const PhysicalParams& params, double t_max, const RunOptions& opts = {});

// <H> with the same three-point discrete H the propagator uses (Dirichlet edges).
double energy_expectation(const WaveFunction& psi, const std::vector<double>& potential,
                          const PhysicalParams& params);

}  // namespace polywell
