#include "polywell/oracle.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "polywell/spectral.hpp"

namespace polywell {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Gauss-Legendre nodes/weights on [0, 1].
struct GlRule {
    std::vector<double> xi, wi;
    explicit GlRule(int n) : xi(n), wi(n) {
        gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
        if (t == nullptr) throw std::runtime_error("quadrature table allocation failed");
        for (int j = 0; j < n; ++j) {
            gsl_integration_glfixed_point(0.0, 1.0, j, &xi[j], &wi[j], t);
        }
        gsl_integration_glfixed_table_free(t);
    }
};

// F(w) for 0 <= w <= 2.5 by direct quadrature of exp(i pi s^2 / 2); the
// phase spans at most pi * 2.5^2 / 2 ~ 9.8 rad, well inside a 32-node rule.
cplx fresnel_small(double w, const GlRule& rule) {
    cplx sum = 0.0;
    for (std::size_t j = 0; j < rule.xi.size(); ++j) {
        double s = w * rule.xi[j];
        sum += rule.wi[j] * std::exp(kI * (0.5 * kPi * s * s));
    }
    return w * sum;
}

// F(w) = (1+i)/2 - G(w) for w > 2.5, with the tail integral G taken down the
// steepest-descent ray s = w + u exp(i pi/4) and rescaled by u = sqrt(2) r /
// (pi w) so the integrand becomes exp(-r(1-i)) exp(-r^2/(pi w^2)) on [0, 40].
cplx fresnel_large(double w, const GlRule& rule) {
    constexpr double kCut = 40.0;
    const double inv_c = 1.0 / (kPi * w * w);
    cplx sum = 0.0;
    for (std::size_t j = 0; j < rule.xi.size(); ++j) {
        double r = kCut * rule.xi[j];
        sum += rule.wi[j] * std::exp(cplx(-r - r * r * inv_c, r));
    }
    cplx g = std::exp(kI * (0.25 * kPi + 0.5 * kPi * w * w)) *
             (std::numbers::sqrt2 / (kPi * w)) * (kCut * sum);
    return cplx(0.5, 0.5) - g;
}

const GlRule& small_rule() {
    static const GlRule r(32);
    return r;
}
const GlRule& large_rule() {
    static const GlRule r(64);
    return r;
}

}  // namespace

cplx fresnel(double w) {
    double aw = std::abs(w);
    cplx f = (aw <= 2.5) ? fresnel_small(aw, small_rule()) : fresnel_large(aw, large_rule());
    return (w < 0.0) ? -f : f;
}

cplx free_square_packet(double x, double t, double q, double x0, double d, double mass) {
    if (!(d > 0.0) || !(mass > 0.0)) {
        throw std::invalid_argument("free_square_packet: d and mass must be > 0");
    }
    if (t == 0.0) {
        return (std::abs(x - x0) <= d) ? std::exp(kI * (q * x)) : cplx(0.0);
    }
    if (!(t > 0.0)) throw std::invalid_argument("free_square_packet: t must be >= 0");
    const double tau = t / (2.0 * mass);
    const double scale = std::sqrt(2.0 * kPi * tau);
    const double xi = x - x0 - q * t / mass;
    const cplx phase = std::exp(kI * (q * x - q * q * tau));
    return phase * cplx(0.5, -0.5) * (fresnel((xi + d) / scale) - fresnel((xi - d) / scale));
}

cplx packet_amplitude(cplx p, double q, double x0, double d) {
    cplx u = p - q;
    cplx z = u * d;
    cplx phase = std::exp(-kI * u * x0);
    if (std::abs(z) < 1e-4) {
        cplx z2 = z * z;
        return phase * (d / kPi) * (1.0 - z2 / 6.0 * (1.0 - z2 / 20.0));
    }
    return phase * std::sin(z) / (kPi * u);
}

StationaryState stationary_state(cplx p, double mass, double depth, double half_width) {
    if (!(mass > 0.0) || !(depth > 0.0) || !(half_width > 0.0)) {
        throw std::invalid_argument("stationary_state: parameters must be > 0");
    }
    const double a = half_width;
    const cplx pp = std::sqrt(p * p + 2.0 * mass * depth);
    const cplx ea = std::exp(kI * p * a);    // e^{ipa}
    const cplx iea = 1.0 / ea;               // e^{-ipa}
    const cplx eb = std::exp(kI * pp * a);   // e^{ip'a}
    const cplx ieb = 1.0 / eb;               // e^{-ip'a}

    // Unknowns z = (R, A, B, T); continuity of value and derivative at +-a.
    cplx m[4][5] = {
        {ea, -ieb, -eb, 0.0, -iea},
        {-p * ea, -pp * ieb, pp * eb, 0.0, -p * iea},
        {0.0, eb, ieb, -ea, 0.0},
        {0.0, pp * eb, -pp * ieb, -p * ea, 0.0},
    };
    cplx saved[4][5];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 5; ++c) saved[r][c] = m[r][c];

    // Gaussian elimination with partial pivoting.
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r) {
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        }
        if (piv != c) {
            for (int k = c; k < 5; ++k) std::swap(m[c][k], m[piv][k]);
        }
        if (std::abs(m[c][c]) == 0.0) {
            throw std::runtime_error("stationary_state: matching system is singular");
        }
        for (int r = c + 1; r < 4; ++r) {
            cplx f = m[r][c] / m[c][c];
            for (int k = c; k < 5; ++k) m[r][k] -= f * m[c][k];
        }
    }
    cplx z[4];
    for (int r = 3; r >= 0; --r) {
        cplx s = m[r][4];
        for (int k = r + 1; k < 4; ++k) s -= m[r][k] * z[k];
        z[r] = s / m[r][r];
    }

    // Relative residual guards against near-singular systems (bound-state
    // poles p = i kappa_n make the homogeneous system solvable).
    double mmax = 0.0, zmax = 0.0, rmax = 0.0;
    for (int r = 0; r < 4; ++r) {
        cplx res = -saved[r][4];
        for (int c = 0; c < 4; ++c) {
            res += saved[r][c] * z[c];
            mmax = std::max(mmax, std::abs(saved[r][c]));
        }
        rmax = std::max(rmax, std::abs(res));
    }
    for (int c = 0; c < 4; ++c) zmax = std::max(zmax, std::abs(z[c]));
    if (rmax > 1e-10 * (mmax * zmax + 1.0)) {
        throw std::runtime_error("stationary_state: matching system is singular");
    }
    return {z[0], z[1], z[2], z[3], pp};
}

namespace {

struct Panel {
    cplx p0;     // start point in the p plane
    cplx dir;    // unit direction
    double len;  // arclength
};

double phase_rate(const cplx& p, double x_max, const SquareWellProblem& pr, double t) {
    return x_max + std::abs(pr.x0) + pr.d + 4.0 * pr.half_width + 1.0 +
           std::abs(p) * t / pr.mass;
}

}  // namespace

struct AnalyticEvolver::Impl {
    GlRule base;
    GlRule doubled;
    double height = 0.0;
    double p_max = 0.0;

    Impl(int n) : base(n), doubled(2 * n) {}

    std::vector<Panel> build_panels(const SquareWellProblem& pr, const ContourSpec& cs,
                                    const std::vector<double>& poles, double x_max,
                                    double t) const {
        const cplx corners[6] = {
            {-p_max, 0.0}, {-cs.eta, 0.0},    {-cs.eta, height},
            {cs.eta, height}, {cs.eta, 0.0},  {p_max, 0.0},
        };
        std::vector<Panel> panels;
        for (int seg = 0; seg < 5; ++seg) {
            const cplx a = corners[seg], b = corners[seg + 1];
            const double len = std::abs(b - a);
            const cplx dir = (b - a) / len;
            const bool vertical = std::abs(dir.real()) < 0.5;
            double s = 0.0;
            while (s < len * (1.0 - 1e-12)) {
                const cplx here = a + dir * s;
                double step = cs.rad_per_panel / phase_rate(here, x_max, pr, t);
                step = std::min(step, 0.5);
                if (vertical) {
                    // Panels shrink to eta/2 near each pole height so the
                    // Lorentzian spike of width eta is resolved.
                    double dist = 1e300;
                    for (double kappa : poles) {
                        dist = std::min(dist, std::abs(here.imag() - kappa));
                    }
                    double cap = 0.5 * cs.eta + 0.5 * std::max(0.0, dist - 2.0 * cs.eta);
                    step = std::min(step, cap);
                }
                step = std::min(step, len - s);
                panels.push_back({a + dir * s, dir, step});
                s += step;
            }
        }
        return panels;
    }

    // Visits every quadrature node: fn(p, weight, state). The weight already
    // includes the complex line element.
    template <typename Fn>
    void for_each_node(const std::vector<Panel>& panels, const GlRule& rule,
                       const SquareWellProblem& pr, double t, Fn&& fn) const {
        const cplx time_rate = -kI * t / (2.0 * pr.mass);
        for (const Panel& panel : panels) {
            for (std::size_t j = 0; j < rule.xi.size(); ++j) {
                const cplx p = panel.p0 + panel.dir * (rule.xi[j] * panel.len);
                const cplx w = panel.dir * (rule.wi[j] * panel.len);
                StationaryState st = stationary_state(p, pr.mass, pr.depth, pr.half_width);
                const cplx c =
                    w * packet_amplitude(p, pr.q, pr.x0, pr.d) * std::exp(time_rate * p * p);
                fn(p, c, st);
            }
        }
    }
};

AnalyticEvolver::AnalyticEvolver(const SquareWellProblem& problem, const ContourSpec& contour)
    : problem_(problem), contour_(contour) {
    const auto& pr = problem_;
    if (!(pr.mass > 0.0) || !(pr.depth > 0.0) || !(pr.half_width > 0.0) || !(pr.d > 0.0)) {
        throw std::invalid_argument("analytic evolver: parameters must be > 0");
    }
    if (!(pr.x0 + pr.d < -pr.half_width)) {
        throw std::invalid_argument("analytic evolver: packet must start left of the well");
    }
    ContourSpec& cs = contour_;
    if (!(cs.eta > 0.0) || cs.nodes_per_panel < 4 || !(cs.rad_per_panel > 0.0) ||
        !(cs.eps_quad > 0.0)) {
        throw std::invalid_argument("analytic evolver: bad contour parameters");
    }
    if (cs.height == 0.0) cs.height = 1.25 * std::sqrt(2.0 * pr.mass * pr.depth);
    if (cs.p_max == 0.0) cs.p_max = std::abs(pr.q) + 40.0 / pr.d;
    if (!(cs.height > 0.0) || !(cs.p_max > cs.eta)) {
        throw std::invalid_argument("analytic evolver: bad contour parameters");
    }

    BoundStateSet bs = bound_states(pr.mass, pr.depth, pr.half_width);
    for (const BoundState& s : bs.states) poles_.push_back(s.k);
    std::sort(poles_.begin(), poles_.end());
    if (!poles_.empty() && poles_.back() >= 0.98 * cs.height) {
        throw std::invalid_argument(
            "analytic evolver: invalid contour (bound-state pole at or above the detour)");
    }

    impl_ = std::make_unique<Impl>(cs.nodes_per_panel);
    impl_->height = cs.height;
    impl_->p_max = cs.p_max;
}

AnalyticEvolver::~AnalyticEvolver() = default;

namespace {

// Accumulates one node's scattered field onto a uniform x grid using the
// geometric recurrence exp(i p x_{s+1}) = exp(i p x_s) exp(i p dx). Explicit
// real/imaginary arithmetic keeps the inner loops free of the library's
// complex-multiplication fixups.
struct UniformAccumulator {
    double x_start, dx;
    int n;
    int left_end;     // first index with x > -a (start of interior)
    int right_begin;  // first index with x > +a
    std::vector<cplx> acc;

    UniformAccumulator(double xs, double dxv, int nv, double a)
        : x_start(xs), dx(dxv), n(nv), acc(nv, cplx(0.0)) {
        left_end = n;
        right_begin = n;
        for (int i = 0; i < n; ++i) {
            double x = xs + i * dxv;
            if (x > -a) {
                left_end = i;
                break;
            }
        }
        right_begin = left_end;
        for (int i = left_end; i < n; ++i) {
            double x = xs + i * dxv;
            if (x > a) {
                right_begin = i;
                break;
            }
            right_begin = i + 1;
        }
    }

    static void sweep(cplx* out, int count, int stride, cplx init, cplx ratio) {
        double zr = init.real(), zi = init.imag();
        const double rr = ratio.real(), ri = ratio.imag();
        for (int s = 0; s < count; ++s) {
            if (zr == 0.0 && zi == 0.0) break;   // underflowed into true zero
            *out += cplx(zr, zi);
            out += stride;
            double nr = zr * rr - zi * ri;
            zi = zr * ri + zi * rr;
            zr = nr;
        }
    }

    void add_node(const cplx& p, const cplx& c, const StationaryState& st) {
        const cplx ip = kI * p;
        const cplx ipp = kI * st.p_prime;
        if (left_end > 0) {
            // For Im p > 0 the factor exp(-ipx) decays to the left, so start
            // the recurrence at the right end of the region to avoid seeding
            // it with an underflowed value.
            double x_last = x_start + (left_end - 1) * dx;
            cplx init = c * st.reflection * std::exp(-ip * x_last);
            sweep(acc.data() + (left_end - 1), left_end, -1, init, std::exp(ip * dx));
        }
        if (right_begin > left_end) {
            double xm = x_start + left_end * dx;
            cplx* out = acc.data() + left_end;
            int count = right_begin - left_end;
            sweep(out, count, 1, c * st.interior_right * std::exp(ipp * xm), std::exp(ipp * dx));
            sweep(out, count, 1, c * st.interior_left * std::exp(-ipp * xm), std::exp(-ipp * dx));
            sweep(out, count, 1, -c * std::exp(ip * xm), std::exp(ip * dx));
        }
        if (n > right_begin) {
            // exp(ipx) decays to the right for Im p > 0, so forward order is
            // already the decaying direction here.
            double xr = x_start + right_begin * dx;
            cplx init = c * (st.transmission - 1.0) * std::exp(ip * xr);
            sweep(acc.data() + right_begin, n - right_begin, 1, init, std::exp(ip * dx));
        }
    }
};

cplx scattered_field(double x, double a, const cplx& p, const StationaryState& st) {
    if (x < -a) return st.reflection * std::exp(-kI * p * x);
    if (x > a) return (st.transmission - 1.0) * std::exp(kI * p * x);
    return st.interior_right * std::exp(kI * st.p_prime * x) +
           st.interior_left * std::exp(-kI * st.p_prime * x) - std::exp(kI * p * x);
}

}  // namespace

std::vector<cplx> AnalyticEvolver::evaluate_uniform(double x_start, double dx, int n,
                                                    double t) const {
    if (n < 1 || !(dx > 0.0)) {
        throw std::invalid_argument("evaluate_uniform: need n >= 1 and dx > 0");
    }
    if (!(t >= 0.0)) throw std::invalid_argument("evaluate_uniform: t must be >= 0");
    const double x_max =
        std::max(std::abs(x_start), std::abs(x_start + (n - 1) * dx));
    const auto panels = impl_->build_panels(problem_, contour_, poles_, x_max, t);

    UniformAccumulator coarse(x_start, dx, n, problem_.half_width);
    impl_->for_each_node(panels, impl_->base, problem_, t,
                         [&](const cplx& p, const cplx& c, const StationaryState& st) {
                             coarse.add_node(p, c, st);
                         });
    UniformAccumulator fine(x_start, dx, n, problem_.half_width);
    impl_->for_each_node(panels, impl_->doubled, problem_, t,
                         [&](const cplx& p, const cplx& c, const StationaryState& st) {
                             fine.add_node(p, c, st);
                         });
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst, std::abs(fine.acc[i] - coarse.acc[i]));
    }
    if (worst > contour_.eps_quad) {
        throw std::runtime_error("analytic evolver: not converged (node doubling moved a value by " +
                                 std::to_string(worst) + ")");
    }
    std::vector<cplx> out(n);
    for (int i = 0; i < n; ++i) {
        out[i] = fine.acc[i] + free_square_packet(x_start + i * dx, t, problem_.q, problem_.x0,
                                                  problem_.d, problem_.mass);
    }
    return out;
}

std::vector<cplx> AnalyticEvolver::evaluate_many(const std::vector<double>& xs, double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("evaluate_many: t must be >= 0");
    if (xs.empty()) return {};
    double x_max = 0.0;
    for (double x : xs) x_max = std::max(x_max, std::abs(x));
    const auto panels = impl_->build_panels(problem_, contour_, poles_, x_max, t);
    const double a = problem_.half_width;

    std::vector<cplx> coarse(xs.size(), cplx(0.0)), fine(xs.size(), cplx(0.0));
    impl_->for_each_node(panels, impl_->base, problem_, t,
                         [&](const cplx& p, const cplx& c, const StationaryState& st) {
                             for (std::size_t k = 0; k < xs.size(); ++k) {
                                 coarse[k] += c * scattered_field(xs[k], a, p, st);
                             }
                         });
    impl_->for_each_node(panels, impl_->doubled, problem_, t,
                         [&](const cplx& p, const cplx& c, const StationaryState& st) {
                             for (std::size_t k = 0; k < xs.size(); ++k) {
                                 fine[k] += c * scattered_field(xs[k], a, p, st);
                             }
                         });
    double worst = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        worst = std::max(worst, std::abs(fine[k] - coarse[k]));
    }
    if (worst > contour_.eps_quad) {
        throw std::runtime_error("analytic evolver: not converged (node doubling moved a value by " +
                                 std::to_string(worst) + ")");
    }
    std::vector<cplx> out(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out[k] = fine[k] + free_square_packet(xs[k], t, problem_.q, problem_.x0, problem_.d,
                                              problem_.mass);
    }
    return out;
}

}  // namespace polywell
