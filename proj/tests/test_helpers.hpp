#ifndef KSLAB_TEST_HELPERS_HPP
#define KSLAB_TEST_HELPERS_HPP

#include <cmath>
#include <random>

#include "kslab/model.hpp"

namespace kslab::testing {

inline ModelParams table1_params()
{
    ModelParams p;
    p.d1 = 1.0; p.d2 = 0.1; p.a1 = p.a2 = 0.5; p.mu1 = p.mu2 = 1.0;
    p.lambda = 0.5; p.xi = 0.5; p.L = 0.5; p.chi = 0.0;
    return p;
}

inline ModelParams table3_params()
{
    ModelParams p;
    p.d1 = 5.0; p.d2 = 0.1; p.a1 = p.a2 = 0.5; p.mu1 = p.mu2 = 1.0;
    p.lambda = 5.0; p.xi = 0.1; p.L = 4.0; p.chi = 0.0;
    return p;
}

/// Random parameter set satisfying the equilibrium-existence condition.
inline ModelParams random_params(std::mt19937& rng, double L_lo = 0.3, double L_hi = 8.0)
{
    auto logu = [&rng](double lo, double hi) {
        std::uniform_real_distribution<double> d(std::log(lo), std::log(hi));
        return std::exp(d(rng));
    };
    auto uni = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    ModelParams p;
    p.d1 = logu(0.1, 10.0);
    p.d2 = logu(0.1, 10.0);
    p.mu1 = logu(0.3, 3.0);
    p.mu2 = logu(0.3, 3.0);
    p.a1 = uni(0.0, 0.95);
    p.a2 = uni(0.0, 0.95);
    p.lambda = logu(0.3, 4.0);
    p.xi = uni(-1.0, 2.0);
    p.L = uni(L_lo, L_hi);
    p.chi = 0.0;
    return p;
}

} // namespace kslab::testing

#endif
