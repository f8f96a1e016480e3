#pragma once

#include <memory>
#include <vector>

#include "polywell/core.hpp"

namespace polywell {

// Fresnel integral F(w) = C(w) + i S(w) = integral_0^w exp(i pi s^2 / 2) ds.
cplx fresnel(double w);

// Closed-form free evolution of the square packet exp(iqx) on |x - x0| <= d
// (amplitude 1, not unit norm). Exact for all t >= 0; t = 0 returns the
// indicator itself.
cplx free_square_packet(double x, double t, double q, double x0, double d, double mass);

// Momentum amplitude of that packet against plane waves exp(ipx):
// a(p) = exp(-i(p-q)x0) * sin((p-q)d) / (pi (p-q)), entire in p.
cplx packet_amplitude(cplx p, double q, double x0, double d);

// Matching coefficients for exp(ipx) incident from the left on the square
// well V(x) = -depth on |x| <= half_width:
//   x < -a : exp(ipx) + R exp(-ipx)
//   |x|<= a: A exp(ip'x) + B exp(-ip'x),  p' = sqrt(p^2 + 2 m depth)
//   x >  a : T exp(ipx)
// Valid for complex p away from the bound-state poles p = i kappa_n. The
// principal sqrt branch is safe: R, T and the interior field are even in p',
// so no branch tracking is needed.
struct StationaryState {
    cplx reflection;        // R
    cplx interior_right;    // A, coefficient of exp(+ip'x)
    cplx interior_left;     // B, coefficient of exp(-ip'x)
    cplx transmission;      // T
    cplx p_prime;           // sqrt(p^2 + 2 m depth), principal branch
};

StationaryState stationary_state(cplx p, double mass, double depth, double half_width);

// Square-packet-on-square-well scattering problem evolved analytically.
struct SquareWellProblem {
    double mass = 20.0;
    double depth = 1.0;        // well depth (> 0)
    double half_width = 1.0;   // well half-width a
    double q = 1.0;            // packet carrier momentum
    double x0 = -10.0;         // packet center, must satisfy x0 + d < -a
    double d = 0.5;            // packet half-width
};

// Quadrature contour: real axis with a rectangular detour over the origin,
// tall enough to enclose every bound-state pole p = i kappa_n.
struct ContourSpec {
    double eta = 0.05;          // detour half-gap on the real axis
    double height = 0.0;        // 0 = auto: 1.25 sqrt(2 m depth)
    double p_max = 0.0;         // 0 = auto: q + 40 / d
    int nodes_per_panel = 12;   // Gauss-Legendre order per panel
    double rad_per_panel = 5.0; // phase budget used to size panels
    double eps_quad = 1e-6;     // node-doubling convergence tolerance
};

// Evaluates psi(x,t) as the closed-form free part plus a contour integral of
// the scattered remainder. Throws "invalid contour" if a bound-state pole
// lies at or above the detour, "not converged" if doubling the node count
// moves any requested value by more than eps_quad.
class AnalyticEvolver {
  public:
    AnalyticEvolver(const SquareWellProblem& problem, const ContourSpec& contour = {});
    ~AnalyticEvolver();
    AnalyticEvolver(const AnalyticEvolver&) = delete;
    AnalyticEvolver& operator=(const AnalyticEvolver&) = delete;

    // psi on the uniform grid x_s = x_start + s dx, s = 0 .. n-1.
    std::vector<cplx> evaluate_uniform(double x_start, double dx, int n, double t) const;

    // psi at arbitrary points; costs one exponential per node per point, so
    // meant for small sets.
    std::vector<cplx> evaluate_many(const std::vector<double>& xs, double t) const;

    const SquareWellProblem& problem() const { return problem_; }
    const ContourSpec& contour() const { return contour_; }
    const std::vector<double>& poles() const { return poles_; }   // kappa_n

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    SquareWellProblem problem_;
    ContourSpec contour_;
    std::vector<double> poles_;
};

}  // namespace polywell
