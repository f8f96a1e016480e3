#include "polywell/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polywell {

Propagator::Propagator(const Grid& grid, std::vector<double> potential,
                       PhysicalParams params, CapSpec cap)
    : grid_(grid), potential_(std::move(potential)), params_(params) {
    if (static_cast<int>(potential_.size()) != grid_.n_points) {
        throw std::invalid_argument("Propagator: potential size != grid nodes");
    }
    const int n = grid_.n_points;
    const double kin = 1.0 / (params_.mass * grid_.dx * grid_.dx);
    const cplx half_idt(0.0, 0.5 * grid_.dt);

    // H off-diagonal is -1/(2 m dx^2); diagonal is kin + V_i (+ CAP term).
    off_a_ = half_idt * (-0.5 * kin);   // LHS: 1 + i dt/2 H
    off_b_ = -off_a_;                   // RHS: 1 - i dt/2 H

    std::vector<cplx> diag_a(n);
    diag_b_.resize(n);
    for (int i = 0; i < n; ++i) {
        cplx h_diag = kin + potential_[i];
        if (cap.enabled && cap.margin_width > 0.0) {
            double s_lo = (grid_.x_min + cap.margin_width) - grid_.x(i);
            double s_hi = grid_.x(i) - (grid_.x_max - cap.margin_width);
            double s = std::max({s_lo, s_hi, 0.0}) / cap.margin_width;
            h_diag += cplx(0.0, -cap.strength * s * s);
        }
        diag_a[i] = 1.0 + half_idt * h_diag;
        diag_b_[i] = 1.0 - half_idt * h_diag;
    }

    // Precompute the forward elimination for the interior system (1..n-2).
    const int m = n - 2;
    elim_c_.assign(m, cplx{});
    elim_inv_.assign(m, cplx{});
    cplx denom = diag_a[1];
    elim_inv_[0] = 1.0 / denom;
    elim_c_[0] = off_a_ * elim_inv_[0];
    for (int i = 1; i < m; ++i) {
        denom = diag_a[i + 1] - off_a_ * elim_c_[i - 1];
        elim_inv_[i] = 1.0 / denom;
        elim_c_[i] = off_a_ * elim_inv_[i];
    }
    scratch_.assign(m, cplx{});
}

void Propagator::step(WaveFunction& psi) {
    const int n = grid_.n_points;
    const int m = n - 2;
    auto& v = psi.values;
    v[0] = cplx{};
    v[n - 1] = cplx{};

    // rhs_i = (1 - i dt/2 H) psi, then solve in one fused forward sweep.
    cplx d_prev = (diag_b_[1] * v[1] + off_b_ * v[2]) * elim_inv_[0];
    scratch_[0] = d_prev;
    for (int i = 1; i < m; ++i) {
        cplx rhs = diag_b_[i + 1] * v[i + 1] + off_b_ * (v[i] + v[i + 2]);
        d_prev = (rhs - off_a_ * d_prev) * elim_inv_[i];
        scratch_[i] = d_prev;
    }
    v[m] = scratch_[m - 1];
    for (int i = m - 2; i >= 0; --i) {
        v[i + 1] = scratch_[i] - elim_c_[i] * v[i + 2];
    }
    psi.time += grid_.dt;

    // A non-finite value anywhere infects v[1] through the two sweeps.
    if (!std::isfinite(v[1].real()) || !std::isfinite(v[1].imag())) {
        throw std::runtime_error("Propagator: diverged (non-finite amplitude)");
    }
}

namespace {

bool edge_contaminated(const WaveFunction& psi, int margin, double threshold) {
    const int n = psi.grid.n_points;
    margin = std::min(margin, n / 2);
    for (int i = 0; i < margin; ++i) {
        if (std::norm(psi.values[i]) > threshold ||
            std::norm(psi.values[n - 1 - i]) > threshold) {
            return true;
        }
    }
    return false;
}

}  // namespace

RunResult run(const WaveFunction& initial, const std::vector<double>& potential,
              const PhysicalParams& params, double t_max, const RunOptions& opts) {
    if (t_max < 0.0) {
        throw std::invalid_argument("run: t_max must be >= 0");
    }
    Propagator prop(initial.grid, potential, params, opts.cap);
    const double dt = prop.dt();
    const long long n_steps = std::llround(t_max / dt);

    std::vector<long long> snap_steps;
    for (double t : opts.snapshot_times) {
        snap_steps.push_back(std::clamp<long long>(std::llround(t / dt), 0, n_steps));
    }
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    RunResult result{initial, {}, {}, -1.0, false, true, 0};
    WaveFunction& psi = result.final_state;
    std::size_t next_snap = 0;

    auto sample_norm = [&](long long step) {
        double n = norm(psi);
        if (!std::isfinite(n)) {
            throw std::runtime_error("run: diverged (non-finite norm)");
        }
        result.norm_log.emplace_back(step * dt, n);
        if (std::abs(n - 1.0) > opts.norm_invalid_tolerance) result.norm_valid = false;
    };
    auto check_contamination = [&](long long step) {
        if (result.first_contamination_time < 0.0 &&
            edge_contaminated(psi, opts.edge_margin_nodes, opts.contamination_threshold)) {
            result.first_contamination_time = step * dt;
            return true;
        }
        return false;
    };

    sample_norm(0);
    check_contamination(0);
    if (opts.observer && opts.observer_interval > 0) opts.observer(psi);
    if (next_snap < snap_steps.size() && snap_steps[next_snap] == 0) {
        result.snapshots.push_back(psi);
        ++next_snap;
    }

    for (long long step = 1; step <= n_steps; ++step) {
        prop.step(psi);
        result.steps = step;
        if (step % opts.norm_sample_interval == 0 || step == n_steps) sample_norm(step);
        if (opts.observer && opts.observer_interval > 0 &&
            (step % opts.observer_interval == 0 || step == n_steps)) {
            opts.observer(psi);
        }
        if (next_snap < snap_steps.size() && snap_steps[next_snap] == step) {
            result.snapshots.push_back(psi);
            ++next_snap;
        }
        if (check_contamination(step) && opts.abort_on_contamination) {
            result.aborted_on_contamination = true;
            break;
        }
    }
    return result;
}

double energy_expectation(const WaveFunction& psi, const std::vector<double>& potential,
                          const PhysicalParams& params) {
    const Grid& g = psi.grid;
    const auto& v = psi.values;
    const double inv2mdx2 = 1.0 / (2.0 * params.mass * g.dx * g.dx);
    auto h_apply = [&](int i) -> cplx {
        cplx left = i > 0 ? v[i - 1] : cplx{};
        cplx right = i < g.n_points - 1 ? v[i + 1] : cplx{};
        return -(right - 2.0 * v[i] + left) * inv2mdx2 + potential[i] * v[i];
    };
    double total = 0.0;
    double prev = std::real(std::conj(v[0]) * h_apply(0));
    for (int i = 1; i < g.n_points; ++i) {
        double cur = std::real(std::conj(v[i]) * h_apply(i));
        total += g.dx * 0.5 * (prev + cur);
        prev = cur;
    }
    return total;
}

}  // namespace polywell
