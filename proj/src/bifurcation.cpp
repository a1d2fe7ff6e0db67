#include "kslab/bifurcation.hpp"

#include <cmath>
#include <stdexcept>

namespace kslab {

const char* to_string(BranchStatus s)
{
    switch (s) {
        case BranchStatus::Ok: return "Ok";
        case BranchStatus::Degenerate: return "Degenerate";
        case BranchStatus::NearSingular: return "NearSingular";
    }
    return "?";
}

const char* to_string(BranchStability s)
{
    switch (s) {
        case BranchStability::Stable: return "Stable";
        case BranchStability::Unstable: return "Unstable";
        case BranchStability::NotApplicable: return "NotApplicable";
    }
    return "?";
}

Mat3 mean_matrix(const ModelParams& p)
{
    Mat3 B;
    B[0] = {1.0, p.a1, 0.0};
    B[1] = {p.a2, 1.0, 0.0};
    B[2] = {1.0, 1.0, -p.lambda};
    return B;
}

std::array<double, 3> mean_rhs(const ModeWavenumber& mode, const ModelParams& p,
                               const Equilibrium& eq)
{
    const Eigenmode em = eigenmode(mode, p, eq);
    return {-p.L / (2.0 * eq.u) * em.P * (em.P + p.a1 * em.Q),
            -p.L / (2.0 * eq.v) * em.Q * (em.Q + p.a2 * em.P),
            0.0};
}

Mat3 double_mode_matrix(const ModeWavenumber& mode, const ModelParams& p,
                        const Equilibrium& eq, double chi_k)
{
    const auto mode2 = ModeWavenumber::of(2 * mode.k, p.L);
    return linearization_matrix(mode2, chi_k, p, eq);
}

std::array<double, 3> double_mode_rhs(const ModeWavenumber& mode, const ModelParams& p,
                                      const Equilibrium& eq, double chi_k)
{
    const Eigenmode em = eigenmode(mode, p, eq);
    const double La = mode.lambda;
    return {-chi_k * p.L / 2.0 * em.P * La + p.mu1 * p.L / 4.0 * em.P * (em.P + p.a1 * em.Q),
            -p.xi * p.L / 2.0 * em.Q * La + p.mu2 * p.L / 4.0 * em.Q * (em.Q + p.a2 * em.P),
            0.0};
}

Mat3 projection_matrix(const ModeWavenumber& mode, const ModelParams& p,
                       const Equilibrium& eq)
{
    const Eigenmode em = eigenmode(mode, p, eq);
    const double La = mode.lambda;
    Mat3 A;
    A[0] = {-p.a2 * p.mu2 * eq.v, -(p.d2 * La + p.mu2 * eq.v), p.xi * eq.v * La};
    A[1] = {1.0, 1.0, -(La + p.lambda)};
    A[2] = {em.P, em.Q, 1.0};
    return A;
}

MeanIntegrals solve_mean_system(const ModeWavenumber& mode, const ModelParams& p,
                                const Equilibrium& eq)
{
    if (p.a1 * p.a2 == 1.0) {
        throw std::invalid_argument("solve_mean_system: a1*a2 = 1 makes the system singular");
    }
    const auto x = cramer3(mean_matrix(p), mean_rhs(mode, p, eq));
    return {x[0], x[1], x[2]};
}

DoubleModeIntegrals solve_double_mode_system(const ModeWavenumber& mode, const ModelParams& p,
                                             const Equilibrium& eq, double chi_k)
{
    const Mat3 C = double_mode_matrix(mode, p, eq, chi_k);
    DoubleModeIntegrals out;
    out.det = det3(C);
    if (std::fabs(out.det) < kNearSingularTol * row_norm_product(C)) {
        out.status = BranchStatus::NearSingular;
        return out;
    }
    const auto x = cramer3(C, double_mode_rhs(mode, p, eq, chi_k));
    out.phi = x[0];
    out.psi = x[1];
    out.gamma = x[2];
    return out;
}

double rhs_G(const ModeWavenumber& mode, const ModelParams& p, const Equilibrium& eq,
             const DoubleModeIntegrals& dbl, const MeanIntegrals& mean)
{
    const Eigenmode em = eigenmode(mode, p, eq);
    const double La = mode.lambda;
    return p.a2 * p.mu2 / 2.0 * em.Q * dbl.phi
         + (p.xi / 2.0 * La + p.a2 * p.mu2 / 2.0 * em.P + p.mu2 * em.Q) * dbl.psi
         - p.xi * em.Q * La * dbl.gamma
         + p.a2 * p.mu2 / 2.0 * em.Q * mean.phi
         + (p.a2 * p.mu2 / 2.0 * em.P + p.mu2 * em.Q - p.xi / 2.0 * La) * mean.psi;
}

SecondOrderIntegrals solve_second_order_system(const ModeWavenumber& mode, const ModelParams& p,
                                               const Equilibrium& eq, double G)
{
    const auto x = cramer3(projection_matrix(mode, p, eq), {G, 0.0, 0.0});
    return {x[0], x[1], x[2]};
}

ProjectionIntegrals projection_integrals(const ModeWavenumber& mode, const ModelParams& p,
                                         const Equilibrium& eq)
{
    ProjectionIntegrals out;
    const double chi_k = chi_tilde(mode, p, eq);
    out.mean = solve_mean_system(mode, p, eq);
    out.dbl = solve_double_mode_system(mode, p, eq, chi_k);
    if (out.dbl.status != BranchStatus::Ok) {
        out.status = out.dbl.status;
        return out;
    }
    out.g_value = rhs_G(mode, p, eq, out.dbl, out.mean);
    out.second = solve_second_order_system(mode, p, eq, out.g_value);
    return out;
}

AsymptoticSign K2_asymptotic_sign(const ModeWavenumber& mode, const ModelParams& p,
                                  const Equilibrium& eq, double large_diffusion_floor)
{
    (void)eq;
    AsymptoticSign out;
    out.lambda_star = (14.0 - 2.0 * p.a1 * p.a2) * mode.lambda / (1.0 - p.a1 * p.a2);
    const double gap = out.lambda_star - p.lambda;
    out.sign = (gap > 0.0) - (gap < 0.0);
    out.large_diffusion_ok = std::min(p.d1, p.d2) >= large_diffusion_floor;
    return out;
}

AsymptoticExpansions asymptotic_expansions(const ModeWavenumber& mode, const ModelParams& p,
                                           const Equilibrium& eq)
{
    const double H1 = mode.lambda + p.lambda;
    return {H1 * p.d1 / eq.u, H1};
}

BranchInfo compute_K2(const ModeWavenumber& mode, const ModelParams& p,
                      const Equilibrium& eq, int kmax)
{
    BranchInfo info;
    info.k = mode.k;
    info.chi_k = chi_tilde(mode, p, eq);
    const Eigenmode em = eigenmode(mode, p, eq);
    info.P = em.P;
    info.Q = em.Q;
    info.K1 = 0.0;

    const AsymptoticSign as = K2_asymptotic_sign(mode, p, eq);
    info.K2_asymptotic_sign = as.sign;
    info.lambda_star = as.lambda_star;
    info.large_diffusion_ok = as.large_diffusion_ok;

    // simple-eigenvalue condition: the steady and Hopf thresholds of this
    // mode must not coincide (double zero eigenvalue otherwise)
    const double ch = chi_hat(mode, p, eq);
    const double scale = std::max({std::fabs(info.chi_k), std::fabs(ch), 1e-300});
    if (std::fabs(info.chi_k - ch) <= 1e-9 * scale) {
        info.status = BranchStatus::Degenerate;
        return info;
    }

    const ProjectionIntegrals pi = projection_integrals(mode, p, eq);
    if (pi.status != BranchStatus::Ok) {
        info.status = pi.status;
        return info;
    }

    const double La = mode.lambda;
    const double t_dbl_phi = ((p.d1 * La / (2.0 * eq.u) + 1.5 * p.mu1) * em.P
                              + p.a1 * p.mu1 * em.Q) * pi.dbl.phi;
    const double t_dbl_psi = p.a1 * p.mu1 / 2.0 * em.P * pi.dbl.psi;
    const double t_dbl_gamma = ((p.d1 * La / eq.u + p.mu1) * em.P * em.P
                                + p.a1 * p.mu1 * em.P * em.Q) * pi.dbl.gamma;
    const double t_sec_phi = (p.d1 * La + p.mu1 * eq.u) * pi.second.phi;
    const double t_sec_psi = p.a1 * p.mu1 * eq.u * pi.second.psi;
    const double t_sec_gamma = ((p.d1 * La + p.mu1 * eq.u) * em.P
                                + p.a1 * p.mu1 * eq.u * em.Q) * pi.second.gamma;
    const double t_mean_phi = (p.d1 * La / (2.0 * eq.u) - p.mu1 / 2.0) * em.P * pi.mean.phi;
    const double t_mean_psi = p.a1 * p.mu1 / 2.0 * em.P * pi.mean.psi;

    const double lhs = t_dbl_phi + t_dbl_psi - t_dbl_gamma
                     + t_sec_phi + t_sec_psi - t_sec_gamma
                     - t_mean_phi + t_mean_psi;
    info.K2 = lhs / (eq.u * La * p.L / 2.0);

    const StabilityReport rep = critical_chi(p, eq, kmax);
    if (rep.loss_type == LossType::Degenerate) {
        info.predicted_stability = BranchStability::NotApplicable;
    } else if (rep.loss_type == LossType::Hopf) {
        info.predicted_stability = BranchStability::Unstable;
    } else if (mode.k != rep.argmin_k) {
        info.predicted_stability = BranchStability::Unstable;
    } else {
        info.predicted_stability = info.K2 > 0.0 ? BranchStability::Stable
                                                 : BranchStability::Unstable;
    }
    return info;
}

} // namespace kslab
