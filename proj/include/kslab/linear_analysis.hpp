#ifndef KSLAB_LINEAR_ANALYSIS_HPP
#define KSLAB_LINEAR_ANALYSIS_HPP

#include <array>
#include <complex>

#include "kslab/mat3.hpp"
#include "kslab/model.hpp"

namespace kslab {

/// Spatial cosine mode k with eigenvalue Lambda = (k pi / L)^2 of -d^2/dx^2
/// under zero-flux boundaries.
struct ModeWavenumber {
    int k = 1;
    double lambda = 0.0;

    static ModeWavenumber of(int k, double L);
};

/// Coefficients of the characteristic cubic sigma^3 + alpha2 sigma^2 +
/// alpha1 sigma + alpha0 of the mode-k linearization. alpha2 > 0 always.
struct CharacteristicCoeffs {
    double alpha2 = 0.0;
    double alpha1 = 0.0;
    double alpha0 = 0.0;
};

enum class LossType { SteadyState, Hopf, Degenerate };

const char* to_string(LossType t);

struct StabilityReport {
    double chi0 = 0.0;       // min over k of {chi_tilde_k, chi_hat_k}
    int argmin_k = 0;        // achieving mode (k0 steady type, k1 Hopf type)
    LossType loss_type = LossType::SteadyState;
    int kmax_used = 0;       // truncation bound actually scanned
    bool unstable = false;   // classification of the queried chi, if any
    double queried_chi = 0.0;
};

/// Linearized eigenmode direction (P_k, Q_k, 1) cos(k pi x / L) at the
/// steady-state bifurcation value.
struct Eigenmode {
    double P = 0.0;
    double Q = 0.0;
};

/// Coefficients of the characteristic cubic at mode k and chemotaxis rate chi.
CharacteristicCoeffs char_coeffs(const ModeWavenumber& mode, double chi,
                                 const ModelParams& p, const Equilibrium& eq);

/// The three complex roots of sigma^3 + alpha2 sigma^2 + alpha1 sigma +
/// alpha0, complex roots as exact conjugate pairs. Trigonometric branch for
/// three real roots, stable depressed-cubic otherwise, one Newton polish per
/// root.
std::array<std::complex<double>, 3> cubic_roots(const CharacteristicCoeffs& c);

/// Steady-state threshold: the chi at which alpha0(k) = 0. Closed form; may
/// be negative for large xi.
double chi_tilde(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq);

/// Hopf-type threshold: the chi at which alpha1 alpha2 - alpha0 = 0.
double chi_hat(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq);

/// (P_k, Q_k) spanning the kernel of the mode-k linearization matrix at
/// chi = chi_tilde_k. Satisfies P_k + Q_k = Lambda + lambda.
Eigenmode eigenmode(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq);

/// The mode-k linearization matrix at a given chi (rows scaled as in the
/// dispersion analysis); exposed for null-vector residual checks.
Mat3 linearization_matrix(const ModeWavenumber& mode, double chi,
                          const ModelParams& p, const Equilibrium& eq);

/// chi0 = min over k of {chi_tilde_k, chi_hat_k} with the achieving mode and
/// loss type. Scans k upward, stopping once both threshold sequences exceed
/// the running minimum and have increased for 3 consecutive k (they grow
/// quadratically), capped at kmax. loss_type = Degenerate when the two
/// minima tie within relative tolerance 1e-9.
StabilityReport critical_chi(const ModelParams& p, const Equilibrium& eq, int kmax = 200);

/// critical_chi plus the Unstable/Stable verdict for the queried chi
/// (unstable iff chi >= chi0).
StabilityReport classify_equilibrium(double chi, const ModelParams& p,
                                     const Equilibrium& eq, int kmax = 200);

/// Per-mode dispersion record at a query chi.
struct DispersionEntry {
    ModeWavenumber mode;
    double chi_tilde = 0.0;
    double chi_hat = 0.0;
    CharacteristicCoeffs coeffs;                       // at the query chi
    std::array<std::complex<double>, 3> eigenvalues;   // at the query chi
};

DispersionEntry dispersion_entry(const ModeWavenumber& mode, double chi,
                                 const ModelParams& p, const Equilibrium& eq);

/// Routh-Hurwitz verdict: all roots in the open left half plane iff
/// alpha0 > 0, alpha1 > 0 and alpha1 alpha2 - alpha0 > 0.
bool routh_hurwitz_stable(const CharacteristicCoeffs& c);

} // namespace kslab

#endif
