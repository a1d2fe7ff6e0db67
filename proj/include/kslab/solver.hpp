#ifndef KSLAB_SOLVER_HPP
#define KSLAB_SOLVER_HPP

#include <functional>
#include <span>
#include <vector>

#include "kslab/model.hpp"

namespace kslab {

/// Uniform cell-centered grid on (0, L): x_i = (i + 1/2) dx, dx = L/n.
struct Grid {
    double L = 0.0;
    int n = 0;
    double dx = 0.0;
    std::vector<double> x;

    static Grid uniform(double L, int n);
};

/// Discretized fields at one time level.
struct State {
    std::vector<double> u, v, w;
    double t = 0.0;
};

enum class Scheme { Explicit, SemiImplicit };
enum class Advection { Central, Upwind };
enum class StopReason { TEnd, Steady, BlowUp };

const char* to_string(StopReason r);

struct SolverConfig {
    double dt = 0.01;
    double t_end = 100.0;
    Scheme scheme = Scheme::SemiImplicit;
    Advection advection = Advection::Central;
    int snapshot_every = 100;       // steps between stored profile snapshots
    int series_every = 1;           // steps between scalar time-series samples
    double steady_tol = 1e-8;       // max |df/dt| threshold for steady detection
    double blowup_ceiling = 1e12;

    bool operator==(const SolverConfig&) const = default;
};

/// Explicit-scheme diffusion stability bound dt <= dx^2 / (2 max(d1,d2,1)).
/// Returns an empty string when cfg is admissible, else the complaint.
std::string check_solver_config(const SolverConfig& cfg, const Grid& g, const ModelParams& p);

/// Equilibrium plus amplitude * cos(wavenumber * pi * x) on each field,
/// sampled at cell centers. Throws std::invalid_argument when the amplitude
/// drives any field nonpositive.
State initial_state(const Grid& g, const Equilibrium& eq,
                    double amplitude = 0.01, double wavenumber = 2.4);

struct StepInfo {
    double max_rate = 0.0;      // max over fields/cells of |df|/dt this step
    bool blowup = false;
    bool negativity = false;    // u or v dipped below -10 eps scale
};

/// Advances the three fields by one time level. SemiImplicit treats
/// diffusion and the -lambda w decay implicitly (one tridiagonal solve per
/// field); the chemotactic flux, kinetics and the u+v source are explicit,
/// with w updated first from beginning-of-step u, v. Explicit is forward
/// Euler on everything. The chemotactic flux is in conservative face form
/// with arithmetic-mean (Central) or donor-cell (Upwind) face values; walls
/// carry zero flux via mirror ghosts.
class Stepper {
public:
    Stepper(const Grid& g, const ModelParams& p, const SolverConfig& cfg);

    StepInfo step(State& s);

    const Grid& grid() const { return *grid_; }

private:
    const Grid* grid_;
    ModelParams p_;
    SolverConfig cfg_;
    // prefactored Thomas coefficients for the three implicit solves
    struct Tri {
        std::vector<double> diag, upper, scratch;
        double lower_ = 0.0;
        void factor(int n, double dt, double dx, double d, double extra);
        void solve(std::vector<double>& rhs_inout);
    };
    Tri tri_u_, tri_v_, tri_w_;
    std::vector<double> flux_, rate_u_, rate_v_, rate_w_, wnew_;

    void chemo_divergence(double coeff, const std::vector<double>& field,
                          const std::vector<double>& w, std::vector<double>& out) const;
    void laplacian(const std::vector<double>& f, std::vector<double>& out) const;
};

struct SeriesSample {
    double t = 0.0;
    double u_at_x0 = 0.0;
    double u_at_mid = 0.0;
    double mass_u = 0.0;
    double mass_v = 0.0;
    double linf_u = 0.0;
};

struct Trajectory {
    std::vector<State> snapshots;        // decimated by snapshot_every
    std::vector<SeriesSample> series;    // decimated by series_every
    StopReason reason = StopReason::TEnd;
    long negativity_events = 0;
    double first_negativity_time = -1.0;
    double mass_u0 = 0.0;                // initial masses, for the mass bound
    double mass_v0 = 0.0;
};

using Observer = std::function<void(const State&)>;

/// Runs the stepper until t_end, steady-state detection (100 consecutive
/// steps below steady_tol) or blow-up. Observers fire on every stored
/// snapshot. The initial state is always the first snapshot and series entry.
Trajectory run(State state, const Grid& g, const ModelParams& p, const SolverConfig& cfg,
               const std::vector<Observer>& observers = {});

double mass(std::span<const double> field, const Grid& g);

} // namespace kslab

#endif
