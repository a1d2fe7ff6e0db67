#ifndef KSLAB_MAT3_HPP
#define KSLAB_MAT3_HPP

#include <array>
#include <cmath>

namespace kslab {

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    std::array<double, 3>& operator[](int i) { return m[i]; }
    const std::array<double, 3>& operator[](int i) const { return m[i]; }

    Mat3 with_column(int j, const std::array<double, 3>& col) const
    {
        Mat3 out = *this;
        for (int i = 0; i < 3; ++i) out.m[i][j] = col[i];
        return out;
    }
};

/// a*b - c*d with one rounding (Kahan's fma trick). Immune to the
/// catastrophic cancellation a naive evaluation suffers when a*b ~ c*d.
inline double diff_of_products(double a, double b, double c, double d)
{
    const double w = c * d;
    const double e = std::fma(c, d, -w);
    const double f = std::fma(a, b, -w);
    return f - e;
}

/// Determinant by cofactor expansion. The three 2x2 minors are formed with
/// diff_of_products and the outer sum uses error-free product splitting plus
/// Neumaier summation, so the large mutually-cancelling d1*d2 products that
/// appear in the mode-2k system at big diffusion rates do not wipe out the
/// result.
inline double det3(const Mat3& A)
{
    const double minor0 = diff_of_products(A[1][1], A[2][2], A[1][2], A[2][1]);
    const double minor1 = diff_of_products(A[1][0], A[2][2], A[1][2], A[2][0]);
    const double minor2 = diff_of_products(A[1][0], A[2][1], A[1][1], A[2][0]);

    // two-product split of each cofactor term
    double terms[6];
    const double c0 = A[0][0], c1 = -A[0][1], c2 = A[0][2];
    terms[0] = c0 * minor0;
    terms[1] = std::fma(c0, minor0, -terms[0]);
    terms[2] = c1 * minor1;
    terms[3] = std::fma(c1, minor1, -terms[2]);
    terms[4] = c2 * minor2;
    terms[5] = std::fma(c2, minor2, -terms[4]);

    double sum = 0.0, comp = 0.0;
    for (double v : terms) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

/// Scale proxy used for near-singularity thresholds: product of row norms.
inline double row_norm_product(const Mat3& A)
{
    double prod = 1.0;
    for (int i = 0; i < 3; ++i) {
        prod *= std::sqrt(A[i][0] * A[i][0] + A[i][1] * A[i][1] + A[i][2] * A[i][2]);
    }
    return prod;
}

/// Cramer-rule solve; det_out receives det(A) when non-null.
inline std::array<double, 3> cramer3(const Mat3& A, const std::array<double, 3>& b,
                                     double* det_out = nullptr)
{
    const double det = det3(A);
    if (det_out) *det_out = det;
    return {det3(A.with_column(0, b)) / det,
            det3(A.with_column(1, b)) / det,
            det3(A.with_column(2, b)) / det};
}

inline std::array<double, 3> mat3_apply(const Mat3& A, const std::array<double, 3>& x)
{
    std::array<double, 3> y{};
    for (int i = 0; i < 3; ++i)
        y[i] = A[i][0] * x[0] + A[i][1] * x[1] + A[i][2] * x[2];
    return y;
}

} // namespace kslab

#endif
