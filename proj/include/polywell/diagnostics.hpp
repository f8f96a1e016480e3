#pragma once

#include <string>
#include <vector>

#include "polywell/core.hpp"

namespace polywell {

// Boundaries separating reflected / in-well / transmitted regions. Defaults
// follow the well's width scale.
struct RegionSplit {
    double left_edge = -1.0;
    double right_edge = 1.0;
};

struct RegionProbabilities {
    double reflected = 0.0;
    double in_well = 0.0;
    double transmitted = 0.0;
};

// Three trapezoidal region integrals; they add up to norm(psi) exactly up to
// roundoff because all pieces integrate the same interpolant.
RegionProbabilities split_probabilities(const WaveFunction& psi, const RegionSplit& split);

// One local maximum of |psi|^2: sub-grid position from a 3-point parabolic
// refinement, height = |psi| at the refined maximum.
struct Peak {
    double position = 0.0;
    double height = 0.0;
};

// Local maxima of |psi|^2 over [x_lo, x_hi] whose |psi|^2 exceeds
// prominence * (regional max of |psi|^2), sorted by position.
// prominence must lie in (0, 1). An empty result is not an error.
std::vector<Peak> detect_peaks(const WaveFunction& psi, double x_lo, double x_hi,
                               double prominence = 0.1);

// Decaying-train model amplitude ~ exp(-lambda |x|) sin^2(k x): peaks sit
// pi/k apart, so k = pi / (median spacing); lambda = -slope of the
// least-squares line through (|x_peak|, ln height).
struct EnvelopeFit {
    double lambda = 0.0;        // amplitude decay rate
    double k = 0.0;             // modulation wavenumber
    double residual = 0.0;      // RMS residual of the log-height line fit
    double spacing_cov = 0.0;   // coefficient of variation of peak spacings
    int n_peaks = 0;
};

// Throws "insufficient peaks" when fewer than 3 peaks are supplied.
EnvelopeFit fit_envelope(const std::vector<Peak>& peaks);

struct ClassifyOptions {
    double prominence = 0.1;
    double spacing_cov_max = 0.15;
    double envelope_residual_max = 1.0;
    int min_peaks = 3;
};

// Wave-train verdict with its three sub-verdicts recorded.
struct WaveTrainVerdict {
    bool is_wave_train = false;
    bool enough_peaks = false;
    bool spacing_regular = false;
    bool envelope_clean = false;
    EnvelopeFit fit;   // meaningful only when enough_peaks
};

// Classifies the reflected region [grid left edge, split.left_edge].
WaveTrainVerdict classify_wave_train(const WaveFunction& psi, const RegionSplit& split,
                                     const ClassifyOptions& options = {});

// k of the in-well standing pattern: pi / (median spacing of interior |psi|
// antinodes). Throws "no standing pattern" with fewer than 2 antinodes.
double interior_wavenumber(const WaveFunction& psi, const RegionSplit& split);

// One observer sample: region probabilities, conditional region centers
// (NaN when a region holds less than the empty-region threshold), and the
// literal unnormalized moments.
struct TrackSample {
    double t = 0.0;
    double p_refl = 0.0, p_well = 0.0, p_trans = 0.0;
    double norm_value = 0.0;
    double cm_refl = 0.0, cm_trans = 0.0;          // conditional means (or NaN)
    double moment_refl = 0.0, moment_trans = 0.0;  // integral x|psi|^2 dx per region
};

// Records a TrackSample per call; pass via RunOptions::observer, e.g.
//   opts.observer = std::ref(recorder);
class TrackRecorder {
  public:
    explicit TrackRecorder(const RegionSplit& split) : split_(split) {}
    void operator()(const WaveFunction& psi);
    const std::vector<TrackSample>& samples() const { return samples_; }

  private:
    RegionSplit split_;
    std::vector<TrackSample> samples_;
};

// First sampled time from which p_refl stays within [90%, 115%] of its final
// value: a track rising from zero forms at the 90% crossing, while a track
// draining toward its final value from above forms once it settles under the
// 115% mark. Throws "never formed" when the final value is below 1e-3.
double formation_time(const std::vector<TrackSample>& track);

inline constexpr double kFormationLowBand = 0.9;
inline constexpr double kFormationHighBand = 1.15;

inline constexpr const char* kFormationDefinition =
    "first sampled t from which p_refl stays within [0.90, 1.15] * final p_refl";

struct SpeedFit {
    double speed = 0.0;
    double residual = 0.0;            // RMS of the linear fit
    double residual_fraction = 0.0;   // residual / track range
    int n_used = 0;
};

// Least-squares slope of the reflected conditional CM over samples with
// t >= t_start. Needs >= 10 usable samples; throws "nonlinear track" when the
// fit residual exceeds 10% of the track's range.
SpeedFit reflected_speed(const std::vector<TrackSample>& track, double t_start);

// Same fit on the transmitted conditional CM, over samples taken after the
// transmitted probability first reaches half its final value.
SpeedFit transmitted_speed(const std::vector<TrackSample>& track);

// Everything the run produced, in one serializable bundle. Optional entries
// (absent when their defining event never happened) carry a has_ flag.
struct DiagnosticsReport {
    double p_refl = 0.0, p_well = 0.0, p_trans = 0.0;   // at the final state
    double closure_error = 0.0;   // max |p_refl+p_well+p_trans - norm| over samples
    std::vector<TrackSample> track;
    bool has_formation = false;
    double formation = 0.0;
    std::string formation_definition = kFormationDefinition;
    bool has_v_refl = false;
    SpeedFit v_refl;
    bool has_v_trans = false;
    SpeedFit v_trans;
    bool has_interior_k = false;
    double interior_k = 0.0;
    WaveTrainVerdict verdict;
    std::vector<Peak> reflected_peaks;
    bool polychotomous = false;
};

// Assembles the report, absorbing the "never formed" / "nonlinear track" /
// "no standing pattern" / "insufficient peaks" outcomes into absent fields
// instead of throwing. interior_region, when given, narrows the window used
// for the standing-pattern wavenumber (e.g. the half-depth contour of a
// smooth well); the probability split is unaffected.
DiagnosticsReport build_report(const WaveFunction& final_state,
                               const std::vector<TrackSample>& track,
                               const RegionSplit& split, const ClassifyOptions& options = {},
                               const RegionSplit* interior_region = nullptr);

}  // namespace polywell
