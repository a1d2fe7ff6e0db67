#ifndef KSLAB_BIFURCATION_HPP
#define KSLAB_BIFURCATION_HPP

#include "kslab/linear_analysis.hpp"
#include "kslab/mat3.hpp"
#include "kslab/model.hpp"

namespace kslab {

enum class BranchStatus { Ok, Degenerate, NearSingular };
enum class BranchStability { Stable, Unstable, NotApplicable };

const char* to_string(BranchStatus s);
const char* to_string(BranchStability s);

/// Integrals of the second-order correctors (phi1, psi1, gamma1) against 1.
struct MeanIntegrals {
    double phi = 0.0;
    double psi = 0.0;
    double gamma = 0.0;
};

/// Integrals of (phi1, psi1, gamma1) against cos(2 k pi x / L).
struct DoubleModeIntegrals {
    double phi = 0.0;
    double psi = 0.0;
    double gamma = 0.0;
    BranchStatus status = BranchStatus::Ok;
    double det = 0.0;   // determinant of the mode-2k system
};

/// Integrals of the third-order correctors (phi2, psi2, gamma2) against
/// cos(k pi x / L).
struct SecondOrderIntegrals {
    double phi = 0.0;
    double psi = 0.0;
    double gamma = 0.0;
};

/// All corrector projections entering the pitchfork constant. The corrector
/// functions themselves are never reconstructed; their projections against
/// cos(k pi x/L) vanish identically and are not stored.
struct ProjectionIntegrals {
    MeanIntegrals mean;
    DoubleModeIntegrals dbl;
    SecondOrderIntegrals second;
    double g_value = 0.0;
    BranchStatus status = BranchStatus::Ok;
};

/// Local branch data at the steady-state bifurcation point
/// (u_bar, v_bar, w_bar, chi_k). The branch expands as
/// chi_k(s) = chi_k + s K1 + s^2 K2 + o(s^2) with K1 = 0 (pitchfork).
/// predicted_stability is local, valid only near the bifurcation point.
struct BranchInfo {
    int k = 0;
    double chi_k = 0.0;
    double P = 0.0;
    double Q = 0.0;
    double K1 = 0.0;                 // identically zero
    double K2 = 0.0;
    int K2_asymptotic_sign = 0;      // sign law prediction, large d1 ~ d2
    double lambda_star = 0.0;        // threshold lambda of the sign law
    bool large_diffusion_ok = true;  // false when d1 or d2 below the asymptotic floor
    BranchStability predicted_stability = BranchStability::NotApplicable;
    BranchStatus status = BranchStatus::Ok;
};

/// Relative |det| threshold (against the row-norm product) below which the
/// mode-2k system is reported NearSingular instead of solved.
inline constexpr double kNearSingularTol = 1e-10;

/// Diffusion floor below which the asymptotic sign law is flagged as
/// extrapolating outside its large-diffusion regime.
inline constexpr double kLargeDiffusionFloor = 100.0;

/// Matrix of the mean (integrate-over-the-interval) corrector system.
Mat3 mean_matrix(const ModelParams& p);

/// Matrix of the mode-2k corrector system (the linearization matrix at
/// wavenumber 2k and chi = chi_k).
Mat3 double_mode_matrix(const ModeWavenumber& mode, const ModelParams& p,
                        const Equilibrium& eq, double chi_k);

/// Matrix of the projected second-order system (kernel-complement rows plus
/// the orthogonality row (P_k, Q_k, 1)); its determinant is positive for all
/// parameters satisfying the equilibrium-existence condition.
Mat3 projection_matrix(const ModeWavenumber& mode, const ModelParams& p,
                       const Equilibrium& eq);

std::array<double, 3> mean_rhs(const ModeWavenumber& mode, const ModelParams& p,
                               const Equilibrium& eq);
std::array<double, 3> double_mode_rhs(const ModeWavenumber& mode, const ModelParams& p,
                                      const Equilibrium& eq, double chi_k);

/// Cramer solution of the mean system. Throws std::invalid_argument when
/// a1 a2 = 1 (singular matrix).
MeanIntegrals solve_mean_system(const ModeWavenumber& mode, const ModelParams& p,
                                const Equilibrium& eq);

/// Cramer solution of the mode-2k system; reports NearSingular (resonance of
/// mode 2k with the bifurcating mode) instead of dividing by a vanishing
/// determinant.
DoubleModeIntegrals solve_double_mode_system(const ModeWavenumber& mode, const ModelParams& p,
                                             const Equilibrium& eq, double chi_k);

/// The scalar G driving the second-order system, assembled from the mean and
/// mode-2k projections.
double rhs_G(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq,
             const DoubleModeIntegrals& dbl, const MeanIntegrals& mean);

/// Cramer solution of the second-order system with right-hand side (G, 0, 0).
SecondOrderIntegrals solve_second_order_system(const ModeWavenumber& mode, const ModelParams& p,
                                               const Equilibrium& eq, double G);

/// All projections plus G for mode k.
ProjectionIntegrals projection_integrals(const ModeWavenumber& mode, const ModelParams& p,
                                         const Equilibrium& eq);

/// Exact pitchfork constant K2 for the branch at mode k, assembled from the
/// three corrector systems, plus the asymptotic sign prediction and the
/// local stability verdict.
BranchInfo compute_K2(const ModeWavenumber& mode, const ModelParams& p,
                      const Equilibrium& eq, int kmax = 200);

struct AsymptoticSign {
    int sign = 0;             // -1, 0, +1
    double lambda_star = 0.0;
    bool large_diffusion_ok = true;
};

/// Large-diffusion sign law: sgn K2 = sgn(lambda_star - lambda) with
/// lambda_star = (14 - 2 a1 a2) (k pi / L)^2 / (1 - a1 a2). Valid for
/// d1, d2 large and comparable; flagged when either is below the floor.
AsymptoticSign K2_asymptotic_sign(const ModeWavenumber& mode, const ModelParams& p,
                                  const Equilibrium& eq,
                                  double large_diffusion_floor = kLargeDiffusionFloor);

struct AsymptoticExpansions {
    double chi_k_leading = 0.0;  // ((k pi/L)^2 + lambda) d1 / u_bar
    double P_k_leading = 0.0;    // (k pi/L)^2 + lambda
};

AsymptoticExpansions asymptotic_expansions(const ModeWavenumber& mode, const ModelParams& p,
                                           const Equilibrium& eq);

} // namespace kslab

#endif
