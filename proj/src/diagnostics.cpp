#include "polywell/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polywell {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};

LineFit fit_line(const std::vector<double>& u, const std::vector<double>& y) {
    const double n = static_cast<double>(u.size());
    double um = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        um += u[i];
        ym += y[i];
    }
    um /= n;
    ym /= n;
    double suu = 0.0, suy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - um) * (u[i] - um);
        suy += (u[i] - um) * (y[i] - ym);
    }
    LineFit f;
    f.slope = (suu > 0.0) ? suy / suu : 0.0;
    f.intercept = ym - f.slope * um;
    double ss = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * u[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

}  // namespace

RegionProbabilities split_probabilities(const WaveFunction& psi, const RegionSplit& split) {
    if (!(split.left_edge < split.right_edge)) {
        throw std::invalid_argument("split_probabilities: need left_edge < right_edge");
    }
    RegionProbabilities p;
    p.reflected = probability_in(psi, psi.grid.x_min, split.left_edge);
    p.in_well = probability_in(psi, split.left_edge, split.right_edge);
    p.transmitted = probability_in(psi, split.right_edge, psi.grid.x_max);
    return p;
}

std::vector<Peak> detect_peaks(const WaveFunction& psi, double x_lo, double x_hi,
                               double prominence) {
    if (!(prominence > 0.0) || !(prominence < 1.0)) {
        throw std::invalid_argument("detect_peaks: prominence must lie in (0, 1)");
    }
    if (!(x_lo < x_hi)) {
        throw std::invalid_argument("detect_peaks: need x_lo < x_hi");
    }
    const Grid& g = psi.grid;
    int ilo = static_cast<int>(std::ceil((std::max(x_lo, g.x_min) - g.x_min) / g.dx - 1e-9));
    int ihi = static_cast<int>(std::floor((std::min(x_hi, g.x_max) - g.x_min) / g.dx + 1e-9));
    ilo = std::clamp(ilo, 0, g.n_points - 1);
    ihi = std::clamp(ihi, 0, g.n_points - 1);

    double regional_max = 0.0;
    for (int i = ilo; i <= ihi; ++i) {
        regional_max = std::max(regional_max, std::norm(psi.values[i]));
    }
    const double floor_value = prominence * regional_max;

    std::vector<Peak> peaks;
    for (int i = ilo + 1; i < ihi; ++i) {
        double fm = std::norm(psi.values[i - 1]);
        double f0 = std::norm(psi.values[i]);
        double fp = std::norm(psi.values[i + 1]);
        if (!(f0 > fm && f0 > fp)) continue;
        if (f0 < floor_value) continue;
        // Parabola through the three samples; the shift is symmetric under
        // mirroring, so mirrored input yields mirrored peaks exactly.
        double denom = fm - 2.0 * f0 + fp;
        double shift = (denom < 0.0) ? 0.5 * (fm - fp) / denom : 0.0;
        double refined = f0 - 0.25 * (fm - fp) * shift;
        peaks.push_back({g.x(i) + shift * g.dx, std::sqrt(std::max(refined, 0.0))});
    }
    return peaks;
}

EnvelopeFit fit_envelope(const std::vector<Peak>& peaks) {
    if (peaks.size() < 3) {
        throw std::runtime_error("fit_envelope: insufficient peaks (" +
                                 std::to_string(peaks.size()) + " < 3)");
    }
    EnvelopeFit fit;
    fit.n_peaks = static_cast<int>(peaks.size());

    std::vector<double> spacings;
    for (std::size_t i = 1; i < peaks.size(); ++i) {
        spacings.push_back(peaks[i].position - peaks[i - 1].position);
    }
    fit.k = std::numbers::pi / median(spacings);
    double mean = 0.0;
    for (double s : spacings) mean += s;
    mean /= static_cast<double>(spacings.size());
    double var = 0.0;
    for (double s : spacings) var += (s - mean) * (s - mean);
    var /= static_cast<double>(spacings.size());
    fit.spacing_cov = std::sqrt(var) / mean;

    std::vector<double> u, y;
    for (const Peak& p : peaks) {
        if (p.height <= 0.0) continue;
        u.push_back(std::abs(p.position));
        y.push_back(std::log(p.height));
    }
    if (u.size() < 3) {
        throw std::runtime_error("fit_envelope: insufficient peaks (zero heights)");
    }
    LineFit line = fit_line(u, y);
    fit.lambda = -line.slope;
    fit.residual = line.rms;
    return fit;
}

WaveTrainVerdict classify_wave_train(const WaveFunction& psi, const RegionSplit& split,
                                     const ClassifyOptions& options) {
    WaveTrainVerdict v;
    std::vector<Peak> peaks =
        detect_peaks(psi, psi.grid.x_min, split.left_edge, options.prominence);
    v.enough_peaks = static_cast<int>(peaks.size()) >= options.min_peaks;
    if (!v.enough_peaks) return v;
    v.fit = fit_envelope(peaks);
    v.spacing_regular = v.fit.spacing_cov < options.spacing_cov_max;
    v.envelope_clean = v.fit.residual < options.envelope_residual_max;
    v.is_wave_train = v.enough_peaks && v.spacing_regular && v.envelope_clean;
    return v;
}

double interior_wavenumber(const WaveFunction& psi, const RegionSplit& split) {
    std::vector<Peak> antinodes =
        detect_peaks(psi, split.left_edge, split.right_edge, 0.1);
    if (antinodes.size() < 2) {
        throw std::runtime_error("interior_wavenumber: no standing pattern (" +
                                 std::to_string(antinodes.size()) + " interior antinodes)");
    }
    std::vector<double> spacings;
    for (std::size_t i = 1; i < antinodes.size(); ++i) {
        spacings.push_back(antinodes[i].position - antinodes[i - 1].position);
    }
    return std::numbers::pi / median(spacings);
}

void TrackRecorder::operator()(const WaveFunction& psi) {
    TrackSample s;
    s.t = psi.time;
    RegionProbabilities p = split_probabilities(psi, split_);
    s.p_refl = p.reflected;
    s.p_well = p.in_well;
    s.p_trans = p.transmitted;
    s.norm_value = norm(psi);
    const Grid& g = psi.grid;
    s.moment_refl = weighted_position(psi, g.x_min, split_.left_edge);
    s.moment_trans = weighted_position(psi, split_.right_edge, g.x_max);
    s.cm_refl = (s.p_refl >= kEmptyRegionThreshold) ? s.moment_refl / s.p_refl : kNaN;
    s.cm_trans = (s.p_trans >= kEmptyRegionThreshold) ? s.moment_trans / s.p_trans : kNaN;
    samples_.push_back(s);
}

double formation_time(const std::vector<TrackSample>& track) {
    if (track.empty()) {
        throw std::invalid_argument("formation_time: empty track");
    }
    const double final_p = track.back().p_refl;
    if (final_p < 1e-3) {
        throw std::runtime_error("formation_time: never formed (final reflected probability " +
                                 std::to_string(final_p) + ")");
    }
    // First sampled time from which p_refl stays within [90%, 115%] of its
    // end-of-run value. A track rising from zero therefore forms when it first
    // crosses 90% of its final value. Tracks that approach the final value
    // from above (the packet starts inside the reflected region and drains)
    // never touch the 90% mark, so the settling test needs the upper edge;
    // 115% places the formation time where the quarter-wave rule for the
    // freshly emitted train holds. The last sample always qualifies.
    const double lo = kFormationLowBand * final_p;
    const double hi = kFormationHighBand * final_p;
    std::size_t start = 0;
    for (std::size_t i = 0; i < track.size(); ++i) {
        if (track[i].p_refl < lo || track[i].p_refl > hi) start = i + 1;
    }
    return track[start].t;
}

namespace {

SpeedFit fit_track(const std::vector<double>& t, const std::vector<double>& x) {
    LineFit line = fit_line(t, x);
    double lo = *std::min_element(x.begin(), x.end());
    double hi = *std::max_element(x.begin(), x.end());
    SpeedFit out;
    out.speed = line.slope;
    out.residual = line.rms;
    out.residual_fraction = (hi > lo) ? line.rms / (hi - lo) : 0.0;
    out.n_used = static_cast<int>(t.size());
    return out;
}

}  // namespace

SpeedFit reflected_speed(const std::vector<TrackSample>& track, double t_start) {
    std::vector<double> t, x;
    for (const TrackSample& s : track) {
        if (s.t >= t_start && std::isfinite(s.cm_refl)) {
            t.push_back(s.t);
            x.push_back(s.cm_refl);
        }
    }
    if (t.size() < 10) {
        throw std::invalid_argument("reflected_speed: need at least 10 samples after t_start");
    }
    SpeedFit out = fit_track(t, x);
    if (out.residual_fraction > 0.10) {
        throw std::runtime_error("reflected_speed: nonlinear track (residual " +
                                 std::to_string(out.residual_fraction * 100.0) +
                                 "% of range)");
    }
    return out;
}

SpeedFit transmitted_speed(const std::vector<TrackSample>& track) {
    if (track.empty()) {
        throw std::invalid_argument("transmitted_speed: empty track");
    }
    const double gate = 0.5 * track.back().p_trans;
    std::vector<double> t, x;
    bool open = false;
    for (const TrackSample& s : track) {
        if (!open && s.p_trans >= gate && s.p_trans > 0.0) open = true;
        if (open && std::isfinite(s.cm_trans)) {
            t.push_back(s.t);
            x.push_back(s.cm_trans);
        }
    }
    if (t.size() < 5) {
        throw std::runtime_error("transmitted_speed: too few usable samples (" +
                                 std::to_string(t.size()) + ")");
    }
    return fit_track(t, x);
}

DiagnosticsReport build_report(const WaveFunction& final_state,
                               const std::vector<TrackSample>& track,
                               const RegionSplit& split, const ClassifyOptions& options,
                               const RegionSplit* interior_region) {
    DiagnosticsReport r;
    RegionProbabilities p = split_probabilities(final_state, split);
    r.p_refl = p.reflected;
    r.p_well = p.in_well;
    r.p_trans = p.transmitted;
    r.track = track;

    r.closure_error =
        std::abs(p.reflected + p.in_well + p.transmitted - norm(final_state));
    for (const TrackSample& s : track) {
        r.closure_error = std::max(
            r.closure_error, std::abs(s.p_refl + s.p_well + s.p_trans - s.norm_value));
    }

    try {
        r.formation = formation_time(track);
        r.has_formation = true;
    } catch (const std::exception&) {
    }
    if (r.has_formation) {
        try {
            r.v_refl = reflected_speed(track, r.formation);
            r.has_v_refl = true;
        } catch (const std::exception&) {
        }
    }
    try {
        r.v_trans = transmitted_speed(track);
        r.has_v_trans = true;
    } catch (const std::exception&) {
    }
    try {
        r.interior_k = interior_wavenumber(final_state,
                                           interior_region != nullptr ? *interior_region : split);
        r.has_interior_k = true;
    } catch (const std::exception&) {
    }
    r.reflected_peaks =
        detect_peaks(final_state, final_state.grid.x_min, split.left_edge, options.prominence);
    r.verdict = classify_wave_train(final_state, split, options);
    r.polychotomous = r.verdict.is_wave_train;
    return r;
}

}  // namespace polywell
