#ifndef KSLAB_ORACLES_HPP
#define KSLAB_ORACLES_HPP

#include <functional>
#include <optional>
#include <vector>

#include "kslab/bifurcation.hpp"
#include "kslab/linear_analysis.hpp"
#include "kslab/mat3.hpp"
#include "kslab/model.hpp"

namespace kslab::oracle {

/// 3x3 Gaussian elimination with partial pivoting; the independent
/// cross-check for every Cramer-rule solve.
std::array<double, 3> solve3_pivoted(Mat3 A, std::array<double, 3> b);

/// Expands [lo, hi] geometrically around x0 until f changes sign, then
/// bisects. Returns nullopt when no sign change is found.
std::optional<double> bisect_root(const std::function<double(double)>& f,
                                  double x0, double step, int max_expand = 200,
                                  int iters = 200);

/// chi-root of alpha0(k, chi) = 0 found by bisection (independent of the
/// chi_tilde closed form).
std::optional<double> chi_tilde_bisection(const ModeWavenumber& mode, const ModelParams& p,
                                          const Equilibrium& eq);

/// chi-root of alpha1 alpha2 - alpha0 = 0 found by bisection.
std::optional<double> chi_hat_bisection(const ModeWavenumber& mode, const ModelParams& p,
                                        const Equilibrium& eq);

/// General banded LU with partial pivoting (LAPACK band storage, kl = ku).
class BandedLU {
public:
    BandedLU(int n, int half_bandwidth);

    void add(int i, int j, double v);
    void set(int i, int j, double v);
    void factor();
    void solve(std::vector<double>& rhs) const;

private:
    int n_, kl_, ldab_;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
    bool factored_ = false;

    double& at(int i, int j);
    const double& at(int i, int j) const;
};

/// Corrector projections obtained the slow way: discretize the second-order
/// corrector boundary-value problem with central differences on `cells`
/// cells, deflate the one-dimensional kernel, project the mode-k component
/// out of each field and integrate with the composite rule on cell centers.
/// Validates the Cramer pipeline end to end without sharing code with it.
struct BvpProjections {
    MeanIntegrals mean;
    DoubleModeIntegrals dbl;
    double G = 0.0;
};

BvpProjections corrector_bvp_projections(const ModeWavenumber& mode, const ModelParams& p,
                                         const Equilibrium& eq, int cells = 4096);

} // namespace kslab::oracle

#endif
