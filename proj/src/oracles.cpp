#include "kslab/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kslab::oracle {

std::array<double, 3> solve3_pivoted(Mat3 A, std::array<double, 3> b)
{
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 2; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        }
        if (piv != col) {
            std::swap(A.m[col], A.m[piv]);
            std::swap(b[col], b[piv]);
            std::swap(perm[col], perm[piv]);
        }
        for (int r = col + 1; r < 3; ++r) {
            const double f = A[r][col] / A[col][col];
            for (int c = col; c < 3; ++c) A[r][c] -= f * A[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < 3; ++c) s -= A[r][c] * x[c];
        x[r] = s / A[r][r];
    }
    return x;
}

std::optional<double> bisect_root(const std::function<double(double)>& f,
                                  double x0, double step, int max_expand, int iters)
{
    double lo = x0 - step, hi = x0 + step;
    double flo = f(lo), fhi = f(hi);
    for (int i = 0; i < max_expand && flo * fhi > 0.0; ++i) {
        step *= 2.0;
        lo = x0 - step;
        hi = x0 + step;
        flo = f(lo);
        fhi = f(hi);
    }
    if (flo * fhi > 0.0) return std::nullopt;
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo <= 1e-14 * std::max(1.0, std::fabs(lo) + std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> chi_tilde_bisection(const ModeWavenumber& mode, const ModelParams& p,
                                          const Equilibrium& eq)
{
    return bisect_root(
        [&](double chi) { return char_coeffs(mode, chi, p, eq).alpha0; }, 0.0, 1.0);
}

std::optional<double> chi_hat_bisection(const ModeWavenumber& mode, const ModelParams& p,
                                        const Equilibrium& eq)
{
    return bisect_root(
        [&](double chi) {
            const auto c = char_coeffs(mode, chi, p, eq);
            return c.alpha1 * c.alpha2 - c.alpha0;
        },
        0.0, 1.0);
}

BandedLU::BandedLU(int n, int half_bandwidth)
    : n_(n), kl_(half_bandwidth), ldab_(3 * half_bandwidth + 1),
      ab_(static_cast<size_t>(ldab_) * n, 0.0), ipiv_(n)
{
}

double& BandedLU::at(int i, int j)
{
    // LAPACK band layout with room for pivoting fill: A(i,j) lives at
    // row (2 kl + i - j) of column j, valid for j - 2 kl <= i <= j + kl
    return ab_[static_cast<size_t>(j) * ldab_ + 2 * kl_ + i - j];
}

const double& BandedLU::at(int i, int j) const
{
    return ab_[static_cast<size_t>(j) * ldab_ + 2 * kl_ + i - j];
}

void BandedLU::add(int i, int j, double v)
{
    at(i, j) += v;
}

void BandedLU::set(int i, int j, double v)
{
    at(i, j) = v;
}

void BandedLU::factor()
{
    const int kl = kl_;
    for (int j = 0; j < n_; ++j) {
        const int iend = std::min(n_ - 1, j + kl);
        int piv = j;
        for (int i = j + 1; i <= iend; ++i) {
            if (std::fabs(at(i, j)) > std::fabs(at(piv, j))) piv = i;
        }
        ipiv_[j] = piv;
        const int cend = std::min(n_ - 1, j + 2 * kl);
        if (piv != j) {
            for (int c = j; c <= cend; ++c) std::swap(at(j, c), at(piv, c));
        }
        const double d = at(j, j);
        if (d == 0.0) throw std::runtime_error("banded LU: exactly singular matrix");
        for (int i = j + 1; i <= iend; ++i) {
            const double m = at(i, j) / d;
            at(i, j) = m;
            for (int c = j + 1; c <= cend; ++c) at(i, c) -= m * at(j, c);
        }
    }
    factored_ = true;
}

void BandedLU::solve(std::vector<double>& rhs) const
{
    if (!factored_) throw std::logic_error("banded LU: factor() before solve()");
    const int kl = kl_;
    for (int j = 0; j < n_; ++j) {
        if (ipiv_[j] != j) std::swap(rhs[j], rhs[ipiv_[j]]);
        const int iend = std::min(n_ - 1, j + kl);
        for (int i = j + 1; i <= iend; ++i) rhs[i] -= at(i, j) * rhs[j];
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const int cend = std::min(n_ - 1, i + 2 * kl);
        double s = rhs[i];
        for (int c = i + 1; c <= cend; ++c) s -= at(i, c) * rhs[c];
        rhs[i] = s / at(i, i);
    }
}

namespace {

struct RawProjections {
    double mean[3];
    double dbl[3];
};

RawProjections bvp_projections_at(const ModeWavenumber& mode, const ModelParams& p,
                                  const Equilibrium& eq, int cells)
{
    const int n = cells;
    const double L = p.L;
    const double dx = L / n;
    const double idx2 = 1.0 / (dx * dx);
    const double La = mode.lambda;
    const Eigenmode em = eigenmode(mode, p, eq);
    const double chi_k = chi_tilde(mode, p, eq);

    std::vector<double> cos1(n), cos2(n);
    for (int i = 0; i < n; ++i) {
        const double x = (i + 0.5) * dx;
        cos1[i] = std::cos(mode.k * std::numbers::pi * x / L);
        cos2[i] = std::cos(2.0 * mode.k * std::numbers::pi * x / L);
    }

    // unknowns interleaved (phi_i, psi_i, gamma_i); rows couple nodes i-1..i+1
    const int N = 3 * n;
    BandedLU lu(N, 5);
    std::vector<double> rhs(N, 0.0);

    auto add_d2 = [&](int row, int field, int i, double coeff) {
        // mirror-ghost second difference of `field` at node i into `row`
        const double c = coeff * idx2;
        if (i > 0) lu.add(row, 3 * (i - 1) + field, c);
        if (i < n - 1) lu.add(row, 3 * (i + 1) + field, c);
        const double diag = (i == 0 || i == n - 1) ? -1.0 : -2.0;
        lu.add(row, 3 * i + field, diag * c);
    };

    for (int i = 0; i < n; ++i) {
        const int rphi = 3 * i, rpsi = 3 * i + 1, rgam = 3 * i + 2;
        add_d2(rphi, 0, i, p.d1);
        add_d2(rphi, 2, i, -chi_k * eq.u);
        lu.add(rphi, 3 * i + 0, -p.mu1 * eq.u);
        lu.add(rphi, 3 * i + 1, -p.mu1 * p.a1 * eq.u);
        rhs[rphi] = -chi_k * em.P * La * cos2[i]
                  + p.mu1 * em.P * (em.P + p.a1 * em.Q) * 0.5 * (1.0 + cos2[i]);

        add_d2(rpsi, 1, i, p.d2);
        add_d2(rpsi, 2, i, -p.xi * eq.v);
        lu.add(rpsi, 3 * i + 0, -p.mu2 * p.a2 * eq.v);
        lu.add(rpsi, 3 * i + 1, -p.mu2 * eq.v);
        rhs[rpsi] = -p.xi * em.Q * La * cos2[i]
                  + p.mu2 * em.Q * (em.Q + p.a2 * em.P) * 0.5 * (1.0 + cos2[i]);

        add_d2(rgam, 2, i, 1.0);
        lu.add(rgam, 3 * i + 2, -p.lambda);
        lu.add(rgam, 3 * i + 0, 1.0);
        lu.add(rgam, 3 * i + 1, 1.0);
    }

    // kernel direction (P_k, Q_k, 1) cos(k pi x / L), normalized
    std::vector<double> z(N);
    double znorm = 0.0;
    for (int i = 0; i < n; ++i) {
        z[3 * i] = em.P * cos1[i];
        z[3 * i + 1] = em.Q * cos1[i];
        z[3 * i + 2] = cos1[i];
    }
    for (double v : z) znorm += v * v;
    znorm = std::sqrt(znorm);
    for (double& v : z) v /= znorm;

    lu.factor();
    std::vector<double> y1 = rhs, y2 = z;
    lu.solve(y1);
    lu.solve(y2);
    double zy1 = 0.0, zy2 = 0.0;
    for (int i = 0; i < N; ++i) {
        zy1 += z[i] * y1[i];
        zy2 += z[i] * y2[i];
    }
    const double mu = zy1 / zy2;
    std::vector<double> sol(N);
    for (int i = 0; i < N; ++i) sol[i] = y1[i] - mu * y2[i];

    // enforce the per-field orthogonality to cos(k pi x / L) by projection
    double c1sq = 0.0;
    for (double c : cos1) c1sq += c * c;
    for (int f = 0; f < 3; ++f) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += sol[3 * i + f] * cos1[i];
        const double scale = dot / c1sq;
        for (int i = 0; i < n; ++i) sol[3 * i + f] -= scale * cos1[i];
    }

    RawProjections out{};
    for (int i = 0; i < n; ++i) {
        for (int f = 0; f < 3; ++f) {
            out.mean[f] += sol[3 * i + f] * dx;
            out.dbl[f] += sol[3 * i + f] * cos2[i] * dx;
        }
    }
    return out;
}

} // namespace

BvpProjections corrector_bvp_projections(const ModeWavenumber& mode, const ModelParams& p,
                                         const Equilibrium& eq, int cells)
{
    // one Richardson step on the second-order discretization: the integrals
    // carry a smooth O(dx^2) error, so (4 I_h - I_2h) / 3 removes it
    const RawProjections fine = bvp_projections_at(mode, p, eq, cells);
    const RawProjections coarse = bvp_projections_at(mode, p, eq, cells / 2);
    RawProjections rich{};
    for (int f = 0; f < 3; ++f) {
        rich.mean[f] = (4.0 * fine.mean[f] - coarse.mean[f]) / 3.0;
        rich.dbl[f] = (4.0 * fine.dbl[f] - coarse.dbl[f]) / 3.0;
    }
    BvpProjections out;
    out.mean = {rich.mean[0], rich.mean[1], rich.mean[2]};
    out.dbl = {rich.dbl[0], rich.dbl[1], rich.dbl[2], BranchStatus::Ok, 0.0};
    out.G = rhs_G(mode, p, eq, out.dbl, out.mean);
    return out;
}

} // namespace kslab::oracle
