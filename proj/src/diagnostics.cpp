#include "kslab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kslab {

const char* to_string(PeriodVerdict v)
{
    switch (v) {
        case PeriodVerdict::Periodic: return "Periodic";
        case PeriodVerdict::NotPeriodic: return "NotPeriodic";
        case PeriodVerdict::Steady: return "Steady";
    }
    return "?";
}

ModeSpectrum mode_amplitudes(std::span<const double> field, const Grid& g, int kcut)
{
    if (static_cast<int>(field.size()) != g.n) {
        throw std::invalid_argument("field length does not match grid");
    }
    if (kcut >= g.n / 2) {
        throw std::invalid_argument("kcut must stay below n/2 (Nyquist)");
    }
    ModeSpectrum spec;
    spec.kcut = kcut;
    spec.amplitudes.resize(kcut + 1);
    double sum = 0.0;
    for (double f : field) sum += f;
    spec.amplitudes[0] = sum * g.dx / g.L;
    for (int k = 1; k <= kcut; ++k) {
        double acc = 0.0;
        const double freq = k * std::numbers::pi / g.L;
        for (int i = 0; i < g.n; ++i) acc += field[i] * std::cos(freq * g.x[i]);
        spec.amplitudes[k] = 2.0 * acc * g.dx / g.L;
    }
    return spec;
}

DominantMode dominant_mode(const ModeSpectrum& spec)
{
    DominantMode out;
    double best = 0.0;
    for (int k = 1; k <= spec.kcut; ++k) {
        const double a = std::fabs(spec.amplitudes[k]);
        if (a > best) {
            best = a;
            out.k = k;
            out.amplitude = spec.amplitudes[k];
        }
    }
    if (best <= 1e-12) {
        out.homogeneous = true;
        out.k = std::max(out.k, 1);
        out.amplitude = 0.0;
    }
    return out;
}

bool detect_steady_state(std::span<const double> rates, double steady_tol)
{
    if (rates.size() < 100) return false;
    for (size_t i = rates.size() - 100; i < rates.size(); ++i) {
        if (!(rates[i] < steady_tol)) return false;
    }
    return true;
}

bool detect_steady_state(std::span<const State> history, double dt, double steady_tol)
{
    if (history.size() < 101) return false;
    std::vector<double> rates;
    rates.reserve(history.size() - 1);
    for (size_t s = 1; s < history.size(); ++s) {
        double d = 0.0;
        const State& a = history[s - 1];
        const State& b = history[s];
        for (size_t i = 0; i < a.u.size(); ++i) {
            d = std::max({d, std::fabs(b.u[i] - a.u[i]), std::fabs(b.v[i] - a.v[i]),
                          std::fabs(b.w[i] - a.w[i])});
        }
        rates.push_back(d / dt);
    }
    return detect_steady_state(rates, steady_tol);
}

PeriodEstimate detect_period(std::span<const double> t, std::span<const double> value,
                             double transient_fraction, double prominence)
{
    if (t.size() != value.size() || t.size() < 8) {
        throw std::invalid_argument("detect_period needs a uniformly sampled series");
    }
    if (transient_fraction < 0.0 || transient_fraction > 0.9) {
        throw std::invalid_argument("transient_fraction must lie in [0, 0.9]");
    }
    const size_t i0 = static_cast<size_t>(transient_fraction * static_cast<double>(t.size()));
    double lo = value[i0], hi = value[i0], scale = 0.0;
    for (size_t i = i0; i < value.size(); ++i) {
        lo = std::min(lo, value[i]);
        hi = std::max(hi, value[i]);
        scale = std::max(scale, std::fabs(value[i]));
    }
    PeriodEstimate est;
    if (hi - lo < 1e-8 * std::max(scale, 1e-300)) {
        est.verdict = PeriodVerdict::Steady;
        return est;
    }
    const double threshold = lo + prominence * (hi - lo);
    std::vector<double> peaks;
    for (size_t i = std::max(i0, size_t{1}); i + 1 < value.size(); ++i) {
        if (value[i] > value[i - 1] && value[i] > value[i + 1] && value[i] > threshold) {
            peaks.push_back(t[i]);
        }
    }
    est.n_peaks = static_cast<int>(peaks.size());
    if (peaks.size() < 3) {
        est.verdict = PeriodVerdict::NotPeriodic;
        return est;
    }
    double mean = 0.0;
    for (size_t i = 1; i < peaks.size(); ++i) mean += peaks[i] - peaks[i - 1];
    mean /= static_cast<double>(peaks.size() - 1);
    double spread = 0.0;
    for (size_t i = 1; i < peaks.size(); ++i) {
        spread = std::max(spread, std::fabs(peaks[i] - peaks[i - 1] - mean));
    }
    est.period = mean;
    est.confidence = spread / mean;
    est.verdict = (est.confidence <= 0.2) ? PeriodVerdict::Periodic : PeriodVerdict::NotPeriodic;
    return est;
}

MassBoundReport check_mass_bound(std::span<const SeriesSample> series, double mass0,
                                 double mu, double L, bool species_u)
{
    MassBoundReport rep;
    rep.min_residual = std::numeric_limits<double>::infinity();
    const double t0 = series.empty() ? 0.0 : series.front().t;
    for (const auto& s : series) {
        const double m = species_u ? s.mass_u : s.mass_v;
        const double bound = std::exp(-mu * (s.t - t0)) * mass0 + L;
        const double residual = bound - m;
        if (residual < rep.min_residual) rep.min_residual = residual;
        if (residual < -1e-6 && rep.first_violation_time < 0.0) {
            rep.first_violation_time = s.t;
            rep.ok = false;
        }
    }
    return rep;
}

int count_spikes(std::span<const double> field, const Grid& g)
{
    (void)g;
    const size_t n = field.size();
    if (n < 3) return 0;
    double lo = field[0], hi = field[0];
    for (double f : field) {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    const double range = hi - lo;
    if (range <= 1e-12 * std::max(std::fabs(hi), 1.0)) return 0;
    const double prom = 0.2 * range;
    int count = 0;
    for (size_t i = 1; i + 1 < n; ++i) {
        if (field[i] > field[i - 1] && field[i] > field[i + 1] && field[i] - lo >= prom) {
            ++count;
        }
    }
    if (field[0] > field[1] && field[0] - lo >= prom) ++count;
    if (field[n - 1] > field[n - 2] && field[n - 1] - lo >= prom) ++count;
    return count;
}

} // namespace kslab
