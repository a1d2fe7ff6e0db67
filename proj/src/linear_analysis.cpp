#include "kslab/linear_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kslab {

namespace {

// Shared intermediates of the dispersion formulas at mode k.
struct ModeScratch {
    double La;      // Lambda = (k pi / L)^2
    double A;       // d1 La + mu1 u_bar
    double B;       // d2 La + mu2 v_bar
    double cross;   // a1 a2 mu1 mu2 u_bar v_bar
    double H1;      // La + lambda
    double H2;      // (d1 + d2) La + mu1 u_bar + mu2 v_bar
    double H3;      // A B - cross
};

ModeScratch scratch(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq)
{
    ModeScratch s;
    s.La = mode.lambda;
    s.A = p.d1 * s.La + p.mu1 * eq.u;
    s.B = p.d2 * s.La + p.mu2 * eq.v;
    s.cross = p.a1 * p.a2 * p.mu1 * p.mu2 * eq.u * eq.v;
    s.H1 = s.La + p.lambda;
    s.H2 = (p.d1 + p.d2) * s.La + p.mu1 * eq.u + p.mu2 * eq.v;
    s.H3 = s.A * s.B - s.cross;
    return s;
}

double newton_polish(double x, double a2, double a1, double a0)
{
    const double f = ((x + a2) * x + a1) * x + a0;
    const double df = (3.0 * x + 2.0 * a2) * x + a1;
    if (df != 0.0 && std::isfinite(f / df)) x -= f / df;
    return x;
}

std::complex<double> newton_polish(std::complex<double> x, double a2, double a1, double a0)
{
    const auto f = ((x + a2) * x + a1) * x + a0;
    const auto df = (3.0 * x + 2.0 * a2) * x + a1;
    if (std::abs(df) > 0.0 && std::isfinite(std::abs(f / df))) x -= f / df;
    return x;
}

} // namespace

ModeWavenumber ModeWavenumber::of(int k, double L)
{
    if (k < 1) throw std::invalid_argument("mode index k must be >= 1");
    if (!(L > 0.0)) throw std::invalid_argument("interval length L must be positive");
    const double kpl = static_cast<double>(k) * std::numbers::pi / L;
    return {k, kpl * kpl};
}

const char* to_string(LossType t)
{
    switch (t) {
        case LossType::SteadyState: return "SteadyState";
        case LossType::Hopf: return "Hopf";
        case LossType::Degenerate: return "Degenerate";
    }
    return "?";
}

CharacteristicCoeffs char_coeffs(const ModeWavenumber& mode, double chi,
                                 const ModelParams& p, const Equilibrium& eq)
{
    const ModeScratch s = scratch(mode, p, eq);
    CharacteristicCoeffs c;
    c.alpha2 = s.H1 + s.H2;
    c.alpha1 = s.H1 * s.H2 + s.H3 - (chi * eq.u + p.xi * eq.v) * s.La;
    c.alpha0 = s.H1 * s.H3
             - chi * eq.u * s.La * (p.d2 * s.La + (1.0 - p.a2) * p.mu2 * eq.v)
             - p.xi * eq.v * s.La * (p.d1 * s.La + (1.0 - p.a1) * p.mu1 * eq.u);
    return c;
}

std::array<std::complex<double>, 3> cubic_roots(const CharacteristicCoeffs& c)
{
    const double a2 = c.alpha2, a1 = c.alpha1, a0 = c.alpha0;
    const double shift = a2 / 3.0;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;

    std::array<std::complex<double>, 3> roots;

    const double disc = q * q / 4.0 + p * p * p / 27.0;
    if (p == 0.0 && q == 0.0) {
        roots.fill({-shift, 0.0});
        return roots;
    }
    if (disc <= 0.0) {
        // three real roots, p < 0 here
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int j = 0; j < 3; ++j) {
            const double t = r * std::cos(theta - 2.0 * std::numbers::pi * j / 3.0);
            roots[j] = {newton_polish(t - shift, a2, a1, a0), 0.0};
        }
    } else {
        // one real root; pick the cube-root branch that avoids cancellation
        const double sq = std::sqrt(disc);
        const double big = (q >= 0.0) ? (-q / 2.0 - sq) : (-q / 2.0 + sq);
        const double u = std::cbrt(big);
        const double v = (u != 0.0) ? -p / (3.0 * u) : 0.0;
        const double t_real = u + v;
        const double re = -t_real / 2.0;
        const double im = std::sqrt(3.0) / 2.0 * std::fabs(u - v);
        roots[0] = {newton_polish(t_real - shift, a2, a1, a0), 0.0};
        auto z = newton_polish(std::complex<double>{re - shift, im}, a2, a1, a0);
        roots[1] = z;
        roots[2] = std::conj(z);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return roots;
}

double chi_tilde(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq)
{
    const ModeScratch s = scratch(mode, p, eq);
    const double num = s.H3 * s.H1
        - p.xi * (p.d1 * eq.v * s.La * s.La + (1.0 - p.a1) * p.mu1 * eq.u * eq.v * s.La);
    const double den = p.d2 * eq.u * s.La * s.La + (1.0 - p.a2) * p.mu2 * eq.u * eq.v * s.La;
    return num / den;
}

double chi_hat(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq)
{
    const ModeScratch s = scratch(mode, p, eq);
    const double G1 = (p.d1 + 1.0) * eq.u * s.La * s.La
        + (p.lambda + p.mu1 * eq.u + p.a2 * p.mu2 * eq.v) * eq.u * s.La;
    const double G2 = (p.d2 + 1.0) * eq.v * s.La * s.La
        + (p.lambda + p.a1 * p.mu1 * eq.u + p.mu2 * eq.v) * eq.v * s.La;
    return (-p.xi * G2 + s.H1 * s.H2 * s.H2 + s.H1 * s.H1 * s.H2 + s.H2 * s.H3) / G1;
}

Eigenmode eigenmode(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq)
{
    const double La = mode.lambda;
    const double den = p.d2 * La + (1.0 - p.a2) * p.mu2 * eq.v;
    const double H1 = La + p.lambda;
    return {((p.d2 * La + p.mu2 * eq.v) * H1 - p.xi * eq.v * La) / den,
            (p.xi * eq.v * La - p.a2 * p.mu2 * eq.v * H1) / den};
}

Mat3 linearization_matrix(const ModeWavenumber& mode, double chi,
                          const ModelParams& p, const Equilibrium& eq)
{
    const double La = mode.lambda;
    Mat3 M;
    M[0] = {-(p.d1 * La + p.mu1 * eq.u), -p.a1 * p.mu1 * eq.u, chi * eq.u * La};
    M[1] = {-p.a2 * p.mu2 * eq.v, -(p.d2 * La + p.mu2 * eq.v), p.xi * eq.v * La};
    M[2] = {1.0, 1.0, -(La + p.lambda)};
    return M;
}

bool routh_hurwitz_stable(const CharacteristicCoeffs& c)
{
    return c.alpha0 > 0.0 && c.alpha1 > 0.0 && c.alpha1 * c.alpha2 - c.alpha0 > 0.0;
}

StabilityReport critical_chi(const ModelParams& p, const Equilibrium& eq, int kmax)
{
    if (kmax < 1) throw std::invalid_argument("kmax must be >= 1");

    double min_tilde = std::numeric_limits<double>::infinity();
    double min_hat = std::numeric_limits<double>::infinity();
    int k_tilde = 0, k_hat = 0;
    double prev_tilde = std::numeric_limits<double>::infinity();
    double prev_hat = std::numeric_limits<double>::infinity();
    int rising = 0;
    int scanned = 0;

    for (int k = 1; k <= kmax; ++k) {
        const auto mode = ModeWavenumber::of(k, p.L);
        const double ct = chi_tilde(mode, p, eq);
        const double ch = chi_hat(mode, p, eq);
        scanned = k;
        if (ct < min_tilde) { min_tilde = ct; k_tilde = k; }
        if (ch < min_hat) { min_hat = ch; k_hat = k; }

        const bool rose = (k > 1) && ct > prev_tilde && ch > prev_hat;
        rising = rose ? rising + 1 : 0;
        prev_tilde = ct;
        prev_hat = ch;
        // both sequences grow quadratically in k; once past the minimum and
        // rising for 3 consecutive modes nothing below the running min is left
        if (rising >= 3 && ct > std::min(min_tilde, min_hat) && ch > std::min(min_tilde, min_hat))
            break;
    }

    StabilityReport r;
    r.kmax_used = scanned;
    r.queried_chi = std::numeric_limits<double>::quiet_NaN();
    const double scale = std::max({std::fabs(min_tilde), std::fabs(min_hat), 1e-300});
    if (std::fabs(min_tilde - min_hat) <= 1e-9 * scale) {
        r.loss_type = LossType::Degenerate;
        r.chi0 = std::min(min_tilde, min_hat);
        r.argmin_k = k_tilde;
    } else if (min_tilde < min_hat) {
        r.loss_type = LossType::SteadyState;
        r.chi0 = min_tilde;
        r.argmin_k = k_tilde;
    } else {
        r.loss_type = LossType::Hopf;
        r.chi0 = min_hat;
        r.argmin_k = k_hat;
    }
    return r;
}

StabilityReport classify_equilibrium(double chi, const ModelParams& p,
                                     const Equilibrium& eq, int kmax)
{
    StabilityReport r = critical_chi(p, eq, kmax);
    r.queried_chi = chi;
    r.unstable = chi >= r.chi0;
    return r;
}

DispersionEntry dispersion_entry(const ModeWavenumber& mode, double chi,
                                 const ModelParams& p, const Equilibrium& eq)
{
    DispersionEntry e;
    e.mode = mode;
    e.chi_tilde = chi_tilde(mode, p, eq);
    e.chi_hat = chi_hat(mode, p, eq);
    e.coeffs = char_coeffs(mode, chi, p, eq);
    e.eigenvalues = cubic_roots(e.coeffs);
    return e;
}

} // namespace kslab
