#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "kslab/diagnostics.hpp"
#include "test_helpers.hpp"

using namespace kslab;

namespace {

std::vector<double> synth(const Grid& g, const std::vector<std::pair<int, double>>& modes)
{
    std::vector<double> f(g.n, 0.0);
    for (const auto& [k, amp] : modes) {
        for (int i = 0; i < g.n; ++i) {
            f[i] += amp * std::cos(k * std::numbers::pi * g.x[i] / g.L);
        }
    }
    return f;
}

} // namespace

TEST_CASE("cosine projections on the cell-centered grid")
{
    const Grid g = Grid::uniform(2.0, 128);

    SUBCASE("constant field")
    {
        const auto spec = mode_amplitudes(synth(g, {{0, 3.25}}), g, 10);
        CHECK(spec.amplitudes[0] == doctest::Approx(3.25).epsilon(1e-14));
        for (int k = 1; k <= 10; ++k) CHECK(std::fabs(spec.amplitudes[k]) <= 1e-12);
    }
    SUBCASE("single mode recovers exactly")
    {
        const auto spec = mode_amplitudes(synth(g, {{0, 1.0}, {2, 0.37}}), g, 10);
        CHECK(spec.amplitudes[2] == doctest::Approx(0.37).epsilon(1e-10));
        for (int k = 1; k <= 10; ++k) {
            if (k != 2) CHECK(std::fabs(spec.amplitudes[k]) <= 1e-10);
        }
    }
    SUBCASE("round trip over a random band-limited field")
    {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> amp(-2.0, 2.0);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<std::pair<int, double>> modes{{0, amp(rng)}};
            for (int k = 1; k <= 12; ++k) modes.emplace_back(k, amp(rng));
            const auto spec = mode_amplitudes(synth(g, modes), g, 12);
            for (const auto& [k, a] : modes) {
                CHECK(spec.amplitudes[k] == doctest::Approx(a).epsilon(1e-9));
            }
        }
    }
    SUBCASE("Parseval consistency")
    {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> amp(-1.0, 1.0);
        std::vector<std::pair<int, double>> modes{{0, amp(rng)}};
        for (int k = 1; k <= 8; ++k) modes.emplace_back(k, amp(rng));
        const auto f = synth(g, modes);
        const auto spec = mode_amplitudes(f, g, 8);
        double sum_sq = 2.0 * spec.amplitudes[0] * spec.amplitudes[0];
        for (int k = 1; k <= 8; ++k) sum_sq += spec.amplitudes[k] * spec.amplitudes[k];
        double integral = 0.0;
        for (double v : f) integral += v * v;
        integral *= 2.0 * g.dx / g.L;
        CHECK(sum_sq == doctest::Approx(integral).epsilon(1e-10));
    }
    SUBCASE("Nyquist guard")
    {
        CHECK_THROWS_AS(mode_amplitudes(synth(g, {{0, 1.0}}), g, 64), std::invalid_argument);
    }
}

TEST_CASE("dominant mode selection")
{
    const Grid g = Grid::uniform(1.0, 64);
    SUBCASE("homogeneous flag")
    {
        const auto d = dominant_mode(mode_amplitudes(synth(g, {{0, 0.8}}), g, 10));
        CHECK(d.homogeneous);
        CHECK(d.amplitude == 0.0);
    }
    SUBCASE("argmax with ties toward smaller k")
    {
        const auto d = dominant_mode(mode_amplitudes(synth(g, {{2, 0.5}, {3, 0.4}}), g, 10));
        CHECK(d.k == 2);
        CHECK_FALSE(d.homogeneous);

        ModeSpectrum tie;
        tie.kcut = 4;
        tie.amplitudes = {0.0, 0.3, 0.3, 0.3, 0.1};
        CHECK(dominant_mode(tie).k == 1);
    }
    SUBCASE("sign of the amplitude is irrelevant")
    {
        const auto d = dominant_mode(mode_amplitudes(synth(g, {{2, 0.5}, {3, -0.9}}), g, 10));
        CHECK(d.k == 3);
    }
}

TEST_CASE("steady-state detection")
{
    SUBCASE("frozen state")
    {
        std::vector<double> rates(150, 1e-12);
        CHECK(detect_steady_state(rates, 1e-8));
    }
    SUBCASE("oscillation")
    {
        std::vector<double> rates(150);
        for (size_t i = 0; i < rates.size(); ++i) rates[i] = 1e-3 * (1.0 + std::sin(0.3 * i));
        CHECK_FALSE(detect_steady_state(rates, 1e-8));
    }
    SUBCASE("needs 100 consecutive quiet steps")
    {
        std::vector<double> rates(150, 1e-12);
        rates[100] = 1.0;
        CHECK_FALSE(detect_steady_state(rates, 1e-8));
        std::vector<double> short_rates(80, 0.0);
        CHECK_FALSE(detect_steady_state(short_rates, 1e-8));
    }
    SUBCASE("from stored states")
    {
        const Grid g = Grid::uniform(1.0, 8);
        std::vector<State> frozen(120);
        for (auto& s : frozen) {
            s.u.assign(8, 1.0);
            s.v.assign(8, 1.0);
            s.w.assign(8, 2.0);
        }
        CHECK(detect_steady_state(frozen, 0.01, 1e-8));
        frozen[60].u[3] += 1.0;
        CHECK_FALSE(detect_steady_state(frozen, 0.01, 1e-8));
    }
}

TEST_CASE("period detection")
{
    SUBCASE("known sinusoid")
    {
        std::vector<double> t, y;
        for (int i = 0; i <= 4000; ++i) {
            t.push_back(0.01 * i);
            y.push_back(std::sin(2.0 * std::numbers::pi * t.back() / 5.0));
        }
        const auto est = detect_period(t, y);
        CHECK(est.verdict == PeriodVerdict::Periodic);
        CHECK(std::fabs(est.period - 5.0) <= 0.02);
        CHECK(est.n_peaks >= 3);
        CHECK(est.confidence <= 0.2);
    }
    SUBCASE("constant series is steady")
    {
        std::vector<double> t, y;
        for (int i = 0; i < 500; ++i) {
            t.push_back(0.01 * i);
            y.push_back(1.5);
        }
        CHECK(detect_period(t, y).verdict == PeriodVerdict::Steady);
    }
    SUBCASE("too few peaks")
    {
        std::vector<double> t, y;
        for (int i = 0; i <= 1000; ++i) {
            t.push_back(0.01 * i);
            y.push_back(std::sin(2.0 * std::numbers::pi * t.back() / 12.0));
        }
        // post-transient window holds barely one period
        CHECK(detect_period(t, y).verdict == PeriodVerdict::NotPeriodic);
    }
    SUBCASE("halving the sample step moves the estimate by less than 1%")
    {
        auto series = [](double dt) {
            std::vector<double> t, y;
            for (int i = 0; static_cast<double>(i) * dt <= 60.0; ++i) {
                t.push_back(dt * i);
                y.push_back(std::sin(2.0 * std::numbers::pi * t.back() / 7.3)
                            + 0.2 * std::sin(4.0 * std::numbers::pi * t.back() / 7.3 + 0.4));
            }
            return detect_period(t, y);
        };
        const auto a = series(0.02);
        const auto b = series(0.01);
        REQUIRE(a.verdict == PeriodVerdict::Periodic);
        REQUIRE(b.verdict == PeriodVerdict::Periodic);
        CHECK(std::fabs(a.period - b.period) <= 0.01 * b.period);
    }
    SUBCASE("steady and periodic verdicts exclude each other")
    {
        std::vector<double> t, y;
        for (int i = 0; i <= 3000; ++i) {
            t.push_back(0.01 * i);
            y.push_back(std::sin(2.0 * std::numbers::pi * t.back() / 4.0));
        }
        const auto est = detect_period(t, y);
        CHECK(est.verdict == PeriodVerdict::Periodic);
        CHECK(est.verdict != PeriodVerdict::Steady);
    }
}

TEST_CASE("mass bound report")
{
    SUBCASE("constant subcritical field has slack")
    {
        std::vector<SeriesSample> series;
        const double ubar = 2.0 / 3.0, L = 0.5, mass0 = ubar * L;
        for (int i = 0; i <= 100; ++i) {
            SeriesSample s;
            s.t = 0.1 * i;
            s.mass_u = mass0;
            series.push_back(s);
        }
        const auto rep = check_mass_bound(series, mass0, 1.0, L, true);
        CHECK(rep.ok);
        CHECK(rep.min_residual >= L * (1.0 - ubar) - 1e-9);
    }
    SUBCASE("violations are reported with their onset time")
    {
        std::vector<SeriesSample> series;
        for (int i = 0; i <= 100; ++i) {
            SeriesSample s;
            s.t = 0.1 * i;
            s.mass_u = (i >= 50) ? 10.0 : 0.3;
            series.push_back(s);
        }
        const auto rep = check_mass_bound(series, 0.3, 1.0, 0.5, true);
        CHECK_FALSE(rep.ok);
        CHECK(rep.first_violation_time == doctest::Approx(5.0).epsilon(1e-12));
    }
}

TEST_CASE("spike counting")
{
    const Grid g = Grid::uniform(1.0, 200);
    SUBCASE("monotone layer counts as one boundary spike")
    {
        std::vector<double> f(g.n);
        for (int i = 0; i < g.n; ++i) f[i] = std::exp(-8.0 * g.x[i]);
        CHECK(count_spikes(f, g) == 1);
    }
    SUBCASE("boundary plus interior maximum of cos(3 pi x / L)")
    {
        const auto f = synth(g, {{0, 1.0}, {3, 0.8}});
        CHECK(count_spikes(f, g) == 2);
    }
    SUBCASE("flat field has no spikes")
    {
        CHECK(count_spikes(synth(g, {{0, 1.0}}), g) == 0);
    }
    SUBCASE("low-prominence wiggles are ignored")
    {
        std::vector<double> f(g.n);
        for (int i = 0; i < g.n; ++i) {
            f[i] = std::exp(-8.0 * g.x[i])
                 + 1e-3 * std::cos(20.0 * std::numbers::pi * g.x[i]);
        }
        CHECK(count_spikes(f, g) == 1);
    }
}
