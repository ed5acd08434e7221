// Unit tests for the finite-support machinery: potential evaluation, the
// (u, v) integrator, amplitude extraction, bound states on both routes, and
// the parallel-wells closed forms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qg/core.hpp"
#include "qg/spectrum.hpp"
#include "qg/transfer.hpp"

using namespace qg;

namespace {
constexpr double kPi = 3.14159265358979323846;

Tabulated gaussian_bump() {
    Tabulated tab;
    tab.xi_nm.resize(1801);
    tab.v_ev.resize(1801);
    for (int i = 0; i <= 1800; ++i) {
        const double x = 0.05 + 0.9 * i / 1800.0;
        tab.xi_nm[i] = x;
        tab.v_ev[i] = 0.3 * std::exp(-(x - 0.5) * (x - 0.5) / 0.01);
    }
    return tab;
}

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = "./" + name;
    std::ofstream out(path);
    out << body;
    return path;
}
}  // namespace

TEST_CASE("potential_value evaluates every descriptor") {
    CHECK(potential_value(Free{}, 0.3) == 0.0);
    const PotentialDescriptor well = SquareWell{-0.5, 1.0};
    CHECK(potential_value(well, 0.2) == -0.5);
    CHECK(potential_value(well, 1.2) == 0.0);
    const PotentialDescriptor barrier = SquareBarrier{2.0, 0.5};
    CHECK(potential_value(barrier, 0.25) == 2.0);
    CHECK(potential_value(barrier, 0.75) == 0.0);

    const PotentialDescriptor tab = Tabulated{{0.2, 0.4, 0.6}, {0.0, 1.0, 0.0}};
    CHECK(potential_value(tab, 0.3) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(potential_value(tab, 0.4) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(potential_value(tab, 0.1) == 0.0);
    CHECK(potential_value(tab, 0.7) == 0.0);

    CHECK_THROWS_AS(
        potential_value(CompositeRing{cplx(0.0, 1.0), cplx(0.0, 0.0)}, 0.5),
        ConfigError);
}

TEST_CASE("integrate_solutions reproduces free trigonometric solutions") {
    const double k = 1.7;
    const auto sp =
        integrate_solutions(Free{}, k_to_ev(k), IntegrationGrid{0.0, 1.0, 2e-4});
    CHECK(sp.u1 == 1.0);
    CHECK(sp.up1 == 0.0);
    CHECK(sp.v1 == 0.0);
    CHECK(sp.vp1 == 1.0);
    CHECK(sp.u2 == doctest::Approx(std::cos(k)).epsilon(1e-10));
    CHECK(sp.up2 == doctest::Approx(-k * std::sin(k)).epsilon(1e-10));
    CHECK(sp.v2 == doctest::Approx(std::sin(k) / k).epsilon(1e-10));
    CHECK(sp.vp2 == doctest::Approx(std::cos(k)).epsilon(1e-10));
    CHECK(sp.wronskian_drift < 1e-8);
    CHECK(!sp.xs.empty());
    CHECK(sp.xs.size() == sp.us.size());
    CHECK(sp.xs.size() == sp.vs.size());
}

TEST_CASE("integrate_solutions halves the step until the drift passes") {
    // a coarse starting step on a fast oscillator still converges
    const auto sp = integrate_solutions(SquareWell{-40.0, 1.0}, k_to_ev(1.0),
                                        IntegrationGrid{0.0, 1.0, 2e-2});
    CHECK(sp.wronskian_drift < 1e-8);
}

TEST_CASE("integrate_solutions gives up on an unresolvable potential") {
    CHECK_THROWS_AS(integrate_solutions(SquareBarrier{1e15, 1.0}, k_to_ev(1.0),
                                        IntegrationGrid{0.0, 1.0, 2e-4}),
                    StepTooCoarse);
}

TEST_CASE("amplitudes_from_solutions: transparent limit and frozen well") {
    const double k = 1.3;
    const auto free_pair =
        integrate_solutions(Free{}, k_to_ev(k), IntegrationGrid{0.0, 1.0, 2e-4});
    const auto free_sr = amplitudes_from_solutions(free_pair, WaveNumber{k});
    CHECK(std::abs(free_sr.t - std::exp(cplx(0.0, k))) < 1e-10);
    CHECK(std::abs(free_sr.r) < 1e-10);

    const auto well_pair = integrate_solutions(SquareWell{-0.5, 1.0}, k_to_ev(k),
                                               IntegrationGrid{0.0, 1.0, 2e-4});
    const auto well_sr = amplitudes_from_solutions(well_pair, WaveNumber{k});
    CHECK(std::abs(well_sr.t - cplx(-0.44041101248724956, -0.62080625534738865)) <
          1e-9);
    CHECK(std::abs(well_sr.r - cplx(-0.52897493676325191, 0.37526423980686219)) <
          1e-9);
    CHECK(std::abs(well_sr.T + well_sr.R - 1.0) < 1e-10);
}

TEST_CASE("the integrated route agrees with the analytic routes everywhere") {
    for (double depth : {-0.5, -2.0}) {
        for (double k : {0.5, 1.3, 2.7, 5.0}) {
            const auto pair = integrate_solutions(
                SquareWell{depth, 1.0}, k_to_ev(k), IntegrationGrid{0.0, 1.0, 2e-4});
            const auto a = amplitudes_from_solutions(pair, WaveNumber{k});
            const cplx bridge = std::exp(cplx(0.0, k));
            const auto m = amplitudes_from_m(m_square_well(depth, 1.0, WaveNumber{k}));
            CHECK(std::abs(a.t - m.t * bridge) < 1e-9);
            CHECK(std::abs(a.r - m.r) < 1e-9);
            const auto [t0, r0] = oracle::square_well_plane(depth, 1.0, k);
            CHECK(std::abs(a.t - t0 * bridge) < 1e-9);
            CHECK(std::abs(a.r - r0) < 1e-9);
        }
    }
    // evanescent barrier interior
    const double k = 1.0;
    const auto pair = integrate_solutions(SquareBarrier{1.0, 0.8}, k_to_ev(k),
                                          IntegrationGrid{0.0, 0.8, 2e-4});
    const auto a = amplitudes_from_solutions(pair, WaveNumber{k});
    const auto [t0, r0] = oracle::square_well_plane(1.0, 0.8, k);
    CHECK(std::abs(a.t - t0 * std::exp(cplx(0.0, 0.8 * k))) < 1e-9);
    CHECK(std::abs(a.r - r0) < 1e-9);
    CHECK(a.T < 1.0);
}

TEST_CASE("amplitudes_from_solutions frozen tabulated bump") {
    const auto pair = integrate_solutions(gaussian_bump(), k_to_ev(2.0),
                                          IntegrationGrid{0.05, 0.95, 2e-4});
    const auto sr = amplitudes_from_solutions(pair, WaveNumber{2.0});
    CHECK(std::abs(sr.t - cplx(0.11722733181591918, 0.93524500834450719)) <
          1e-7);
    CHECK(std::abs(sr.r - cplx(0.33143427998008329, -0.041543291830146899)) <
          1e-7);
}

TEST_CASE("amplitudes_from_solutions rejects a degenerate basis") {
    auto pair = integrate_solutions(Free{}, k_to_ev(1.0),
                                    IntegrationGrid{0.0, 1.0, 2e-4});
    pair.v1 = pair.u1;
    pair.vp1 = pair.up1;
    pair.v2 = pair.u2;
    pair.vp2 = pair.up2;
    CHECK_THROWS_AS(amplitudes_from_solutions(pair, WaveNumber{1.0}),
                    DegenerateBasis);
}

TEST_CASE("find_bound_states matches the quantization-condition roots") {
    const struct {
        double depth;
        std::size_t count;
    } cases[] = {{-0.5, 2}, {-2.0, 3}, {-5.0, 4}};
    for (const auto& c : cases) {
        const double ceiling = std::sqrt(-c.depth / Units::hbar2_over_2m);
        const auto states =
            find_bound_states(SquareWell{c.depth, 1.0}, 1e-3, ceiling, 2000);
        const auto roots = oracle::well_bound_roots(c.depth, 1.0);
        REQUIRE(states.size() == c.count);
        REQUIRE(roots.size() == c.count);
        for (std::size_t i = 0; i < c.count; ++i) {
            CHECK(states[i].kappa == doctest::Approx(roots[i]).epsilon(1e-8));
            CHECK(states[i].energy_ev ==
                  doctest::Approx(-Units::hbar2_over_2m * roots[i] * roots[i])
                      .epsilon(1e-7));
            CHECK(states[i].n_wells == 1);
        }
    }
}

TEST_CASE("bound_state_residual changes sign across each root") {
    const PotentialDescriptor well = SquareWell{-0.5, 1.0};
    for (double root : {0.731195135873642, 3.03164924590147}) {
        const double lo = bound_state_residual(well, root - 1e-4);
        const double hi = bound_state_residual(well, root + 1e-4);
        CHECK(lo * hi < 0.0);
    }
}

TEST_CASE("parallel wells closed forms: frozen points and unitarity") {
    const WaveNumber k{2.0};
    const auto w1 = parallel_wells_scattering(1, -0.5, 1.0, k);
    CHECK(std::abs(w1.t - cplx(-0.3764760188275047, -0.74244915381855048)) <
          1e-12);
    CHECK(std::abs(w1.r - cplx(-0.49420265206278391, 0.25059688732309082)) <
          1e-12);
    const auto w2 = parallel_wells_scattering(2, -0.5, 1.0, k);
    CHECK(std::abs(w2.t - cplx(-0.14782389015689101, -0.50024179233358512)) <
          1e-12);
    const auto w20 = parallel_wells_scattering(20, -0.5, 1.0, k);
    CHECK(std::abs(w20.t - cplx(-0.0017966823221348654, -0.057479179109656442)) <
          1e-12);
    CHECK(std::abs(w20.r - cplx(-0.99785772389738725, 0.031191004469844179)) <
          1e-12);
    for (int n : {1, 2, 5, 20}) {
        for (double kk : {0.6, 2.0, 7.3}) {
            const auto sr = parallel_wells_scattering(n, -0.5, 1.0, WaveNumber{kk});
            CHECK(std::abs(sr.T + sr.R - 1.0) < 1e-12);
            CHECK(std::abs(parallel_wells_amplitude(n, -0.5, 1.0, WaveNumber{kk}) -
                           sr.t) == 0.0);
        }
    }
    // the closed form also covers barrier stacks (positive height)
    const auto barrier = parallel_wells_scattering(3, 0.5, 1.0, k);
    CHECK(std::abs(barrier.T + barrier.R - 1.0) < 1e-12);
    CHECK_THROWS_AS(parallel_wells_scattering(0, -0.5, 1.0, k), ConfigError);
    CHECK_THROWS_AS(parallel_wells_bound_states(1, 0.5, 1.0), ConfigError);
}

TEST_CASE("a single parallel well is the plane-wave well with the span phase") {
    for (double k : {0.9, 2.0, 4.4}) {
        const auto sr = parallel_wells_scattering(1, -0.5, 1.0, WaveNumber{k});
        const auto [t0, r0] = oracle::square_well_plane(-0.5, 1.0, k);
        CHECK(std::abs(sr.t - t0 * std::exp(cplx(0.0, k))) < 1e-12);
        CHECK(std::abs(sr.r - r0) < 1e-12);
    }
}

TEST_CASE("parallel wells transmit perfectly at interior phase pi s") {
    const double v0 = -0.5 / Units::hbar2_over_2m;
    for (int n : {1, 3, 20}) {
        for (int s : {2, 3}) {
            const double k = std::sqrt(kPi * kPi * s * s + v0);
            const auto sr = parallel_wells_scattering(n, -0.5, 1.0, WaveNumber{k});
            CHECK(std::abs(std::abs(sr.t) - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("deeper stacks transmit less at the band minimum") {
    // minimum of T over a fixed window around k = 21 pi, decreasing in n
    auto t_min = [](int n) {
        double best = 2.0;
        for (int i = 0; i <= 4000; ++i) {
            const double k = 21 * kPi - 2.0 + 4.0 * i / 4000.0;
            best = std::min(
                best, parallel_wells_scattering(n, -0.5, 1.0, WaveNumber{k}).T);
        }
        return best;
    };
    const double m1 = t_min(1), m2 = t_min(2), m5 = t_min(5);
    CHECK(m1 > m2);
    CHECK(m2 > m5);
    CHECK(m1 == doctest::Approx(0.9999977).epsilon(1e-3));
    CHECK(m2 == doctest::Approx(0.6388).epsilon(1e-3));
    CHECK(m5 == doctest::Approx(0.1475).epsilon(1e-3));
}

TEST_CASE("the continued amplitude blows up on the bound-state poles") {
    for (int n : {1, 2}) {
        const auto states = parallel_wells_bound_states(n, -0.5, 1.0);
        REQUIRE(states.size() == 2);
        for (const auto& s : states) {
            const cplx tk = parallel_wells_amplitude_continued(
                n, -0.5, 1.0, cplx(0.0, s.kappa));
            CHECK(std::abs(tk) > 1e6);
        }
    }
}

TEST_CASE("parallel-wells bound states: frozen values and the tracked branch") {
    const struct {
        int n;
        double k_low, k_high;
    } cases[] = {{1, 0.731195135874, 3.0316492459},
                 {2, 1.09037285712, 3.25391412938},
                 {3, 1.27478827885, 3.35385354164},
                 {5, 1.45674802588, 3.44805499578},
                 {20, 1.70741798561, 3.57440699114}};
    double prev_tracked = 0.0;
    for (const auto& c : cases) {
        const auto states = parallel_wells_bound_states(c.n, -0.5, 1.0);
        REQUIRE(states.size() == 2);
        CHECK(states[0].kappa == doctest::Approx(c.k_low).epsilon(1e-9));
        CHECK(states[1].kappa == doctest::Approx(c.k_high).epsilon(1e-9));
        CHECK(states[0].n_wells == c.n);

        const auto tracked = parallel_wells_bound_state(c.n, -0.5, 1.0);
        CHECK(tracked.kappa == states[1].kappa);
        CHECK(tracked.kappa > prev_tracked);
        prev_tracked = tracked.kappa;
    }
    // the tracked branch saturates below the well-depth ceiling
    CHECK(prev_tracked < std::sqrt(0.5 / Units::hbar2_over_2m));
}

TEST_CASE("find_bound_states agrees with the pole route for one well") {
    const auto poles = parallel_wells_bound_states(1, -0.5, 1.0);
    const auto states = find_bound_states(SquareWell{-0.5, 1.0}, 1e-3, 3.62, 2000);
    REQUIRE(poles.size() == states.size());
    for (std::size_t i = 0; i < poles.size(); ++i)
        CHECK(states[i].kappa == doctest::Approx(poles[i].kappa).epsilon(1e-8));
}

TEST_CASE("load_tabulated_potential parses the two-column format") {
    const auto path = write_temp("tab_ok.txt",
                                 "# comment line\n"
                                 "0.2 0.0\n"
                                 "\n"
                                 "0.4 1.0   # trailing comment\n"
                                 "0.6 0.5\n");
    const auto tab = load_tabulated_potential(path);
    REQUIRE(tab.xi_nm.size() == 3);
    CHECK(tab.xi_nm[1] == 0.4);
    CHECK(tab.v_ev[1] == 1.0);
    CHECK(tab.v_ev[2] == 0.5);
    std::remove(path.c_str());
}

TEST_CASE("load_tabulated_potential rejects malformed files") {
    const struct {
        const char* name;
        const char* body;
    } bad[] = {
        {"tab_cols.txt", "0.2 0.0 9\n0.4 1.0 9\n"},
        {"tab_one.txt", "0.2 0.0\n"},
        {"tab_dec.txt", "0.4 0.0\n0.2 1.0\n"},
        {"tab_nonuni.txt", "0.1 0.0\n0.2 1.0\n0.4 0.0\n"},
        {"tab_text.txt", "0.1 apple\n0.2 1.0\n"},
    };
    for (const auto& c : bad) {
        const auto path = write_temp(c.name, c.body);
        CHECK_THROWS_AS(load_tabulated_potential(path), IoError);
        std::remove(path.c_str());
    }
    CHECK_THROWS_AS(load_tabulated_potential("./does_not_exist.txt"), IoError);
}
