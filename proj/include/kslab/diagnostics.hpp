#ifndef KSLAB_DIAGNOSTICS_HPP
#define KSLAB_DIAGNOSTICS_HPP

#include <span>
#include <vector>

#include "kslab/solver.hpp"

namespace kslab {

/// Cosine-projection coefficients of a field on the cell-centered grid:
/// amplitudes[0] = (1/L) integral f dx, amplitudes[k] = (2/L) integral
/// f cos(k pi x / L) dx for k = 1..kcut (quadrature on cell centers).
struct ModeSpectrum {
    std::vector<double> amplitudes;
    int kcut = 0;
};

ModeSpectrum mode_amplitudes(std::span<const double> field, const Grid& g, int kcut);

struct DominantMode {
    int k = 0;
    double amplitude = 0.0;
    bool homogeneous = false;   // all k >= 1 amplitudes below 1e-12
};

/// argmax over k >= 1 of |amplitude|, ties toward smaller k.
DominantMode dominant_mode(const ModeSpectrum& spec);

/// True iff max |df/dt| stayed below steady_tol for the last 100 consecutive
/// recorded steps. `rates` holds one max-rate entry per step.
bool detect_steady_state(std::span<const double> rates, double steady_tol);

/// Same verdict computed from stored consecutive states sampled dt apart.
bool detect_steady_state(std::span<const State> history, double dt, double steady_tol);

enum class PeriodVerdict { Periodic, NotPeriodic, Steady };

const char* to_string(PeriodVerdict v);

struct PeriodEstimate {
    PeriodVerdict verdict = PeriodVerdict::NotPeriodic;
    double period = 0.0;
    int n_peaks = 0;
    double confidence = 0.0;   // relative spread of peak-to-peak intervals
};

/// Discards the leading transient_fraction of the series, finds strict local
/// maxima exceeding `prominence` of the post-transient range and reports the
/// mean peak-to-peak interval. Steady when the post-transient range is flat;
/// NotPeriodic when fewer than 3 peaks qualify or their spacing spreads by
/// more than 20%.
PeriodEstimate detect_period(std::span<const double> t, std::span<const double> value,
                             double transient_fraction = 0.5, double prominence = 0.1);

struct MassBoundReport {
    double min_residual = 0.0;        // min over snapshots of bound - mass
    double first_violation_time = -1.0;
    bool ok = true;                   // no residual below -1e-6
};

/// Checks mass(t) <= exp(-mu t) mass(0) + L along the recorded series for
/// one species. A violation indicts the discretization and is reported, not
/// thrown.
MassBoundReport check_mass_bound(std::span<const SeriesSample> series, double mass0,
                                 double mu, double L, bool species_u);

/// Interior strict local maxima with prominence >= 20% of (max - min), plus
/// boundary maxima exceeding the same prominence over the adjacent value.
int count_spikes(std::span<const double> field, const Grid& g);

} // namespace kslab

#endif
