#ifndef KSLAB_MODEL_HPP
#define KSLAB_MODEL_HPP

#include <string>
#include <vector>

namespace kslab {

/// Parameters of the two-species chemotaxis-competition system on (0, L):
///
///   u_t = (d1 u_x - chi u w_x)_x + mu1 (1 - u - a1 v) u
///   v_t = (d2 v_x - xi  v w_x)_x + mu2 (1 - a2 u - v) v
///   w_t = w_xx - lambda w + u + v
///
/// with zero-flux boundaries. Immutable value type; derived quantities are
/// always recomputed rather than cached.
struct ModelParams {
    double d1 = 1.0;      // diffusion rate of u (> 0)
    double d2 = 0.1;      // diffusion rate of v (> 0)
    double chi = 100.0;   // chemotaxis rate of u (any sign)
    double xi = 0.5;      // chemotaxis rate of v (any sign)
    double mu1 = 1.0;     // intrinsic growth rate of u (> 0)
    double mu2 = 1.0;     // intrinsic growth rate of v (> 0)
    double a1 = 0.5;      // competition strength of v on u
    double a2 = 0.5;      // competition strength of u on v
    double lambda = 0.5;  // chemical decay rate (> 0)
    double L = 0.5;       // interval length (> 0)

    bool operator==(const ModelParams&) const = default;
};

/// Homogeneous positive steady state (u_bar, v_bar, w_bar).
struct Equilibrium {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

struct ParamViolation {
    std::string field;
    std::string message;
};

/// Sign constraints required to run the time stepper at all
/// (d1, d2, mu1, mu2, lambda, L positive). Total function.
std::vector<ParamViolation> validate_simulation(const ModelParams& p);

/// Simulation constraints plus 0 <= a1 < 1 and 0 <= a2 < 1, which the
/// equilibrium and every analysis module need. Total function.
std::vector<ParamViolation> validate_analysis(const ModelParams& p);

/// The positive constant steady state
///   u_bar = (1 - a1)/(1 - a1 a2),
///   v_bar = (1 - a2)/(1 - a1 a2),
///   w_bar = (2 - a1 - a2)/(lambda (1 - a1 a2)).
/// Throws std::invalid_argument if validate_analysis(p) reports violations.
Equilibrium compute_equilibrium(const ModelParams& p);

} // namespace kslab

#endif
