#include "kslab/model.hpp"

#include <stdexcept>

namespace kslab {

std::vector<ParamViolation> validate_simulation(const ModelParams& p)
{
    std::vector<ParamViolation> out;
    auto positive = [&out](double val, const char* name) {
        if (!(val > 0.0)) {
            out.push_back({name, std::string(name) + " must be positive"});
        }
    };
    positive(p.d1, "d1");
    positive(p.d2, "d2");
    positive(p.mu1, "mu1");
    positive(p.mu2, "mu2");
    positive(p.lambda, "lambda");
    positive(p.L, "L");
    return out;
}

std::vector<ParamViolation> validate_analysis(const ModelParams& p)
{
    std::vector<ParamViolation> out = validate_simulation(p);
    auto competition = [&out](double val, const char* name) {
        if (!(val >= 0.0)) {
            out.push_back({name, std::string(name) + " must be nonnegative"});
        } else if (!(val < 1.0)) {
            out.push_back({name, std::string(name) + " must be < 1 for positive equilibrium"});
        }
    };
    competition(p.a1, "a1");
    competition(p.a2, "a2");
    return out;
}

Equilibrium compute_equilibrium(const ModelParams& p)
{
    const auto violations = validate_analysis(p);
    if (!violations.empty()) {
        throw std::invalid_argument("compute_equilibrium: " + violations.front().message);
    }
    const double den = 1.0 - p.a1 * p.a2;
    return {(1.0 - p.a1) / den,
            (1.0 - p.a2) / den,
            (2.0 - p.a1 - p.a2) / (p.lambda * den)};
}

} // namespace kslab
