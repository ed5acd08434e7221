// Arbitrary finite-support potentials on a single edge: two independent
// real solutions (u, v) by fixed-step RK4, scattering amplitudes from their
// endpoint data, and bound states from the real continuation residual.
// Also the identical-parallel-wells closed forms and their bound states.
#pragma once

#include <vector>

#include "qg/core.hpp"

namespace qg {

struct IntegrationGrid {
    double x_lo = 0.0;
    double x_hi = 0.0;
    double step = 2e-4;  // nm; halved automatically until drift passes
};

// Endpoint data of two independent solutions of psi'' = (V - E) psi / C
// with u(x_lo) = 1, u'(x_lo) = 0 and v(x_lo) = 0, v'(x_lo) = 1.
struct SolutionPair {
    double u1, up1, v1, vp1;  // values and derivatives at x_lo
    double u2, up2, v2, vp2;  // values and derivatives at x_hi
    double energy_ev;
    double x_lo, x_hi;
    double wronskian_drift;  // max relative drift of u v' - u' v
    std::vector<double> xs, us, vs;

    double mu1() const { return up1 / u1; }
    double mu2() const { return up2 / u2; }
    double nu1() const { return vp1 / v1; }
    double nu2() const { return vp2 / v2; }
};

// RK4 with steps aligned to potential breakpoints; the step is halved until
// the Wronskian drift falls below 1e-8 relative. Throws StepTooCoarse when
// the minimum step is reached first, DegenerateBasis when the pair loses
// independence. Works for any real energy (E < 0 probes bound states).
SolutionPair integrate_solutions(const PotentialDescriptor& potential,
                                 double energy_ev, IntegrationGrid grid);

// Vertex-referenced (t, r) of the edge from endpoint data at k = sqrt(E/C):
// incident frame at x_lo, transmitted frame at x_hi. V = 0 gives t = e^{ikl}.
ScatteringResult amplitudes_from_solutions(const SolutionPair& pair,
                                           WaveNumber k);

// Roots of the real continuation residual g(kappa) (the determinant of the
// endpoint matching system at k = i kappa) on (kappa_lo, kappa_hi), each
// bracketed by a sign change on a scan grid and bisected to 1e-10.
std::vector<BoundState> find_bound_states(const PotentialDescriptor& potential,
                                          double kappa_lo, double kappa_hi,
                                          int scan_points = 2000);

// g(kappa) itself, exposed for pole/zero cross-checks.
double bound_state_residual(const PotentialDescriptor& potential,
                            double kappa);

// Closed-form transmission amplitude of n identical wells in parallel
// between two vertices (vertex-referenced):
//   t_n = 2 i n k q / [(k^2 + n^2 q^2) sin ql + 2 i n k q cos ql].
cplx parallel_wells_amplitude(int n, double depth_ev, double width_nm,
                              WaveNumber k);

// Full closed-form scattering data of the same system.
ScatteringResult parallel_wells_scattering(int n, double depth_ev,
                                           double width_nm, WaveNumber k);

// Analytic continuation of parallel_wells_amplitude to complex k; its poles
// on the positive imaginary axis k = i kappa are the bound states.
cplx parallel_wells_amplitude_continued(int n, double depth_ev,
                                        double width_nm, cplx k);

// All poles of the continued t_n on kappa in (0, sqrt(-V0)), ascending.
std::vector<BoundState> parallel_wells_bound_states(int n, double depth_ev,
                                                    double width_nm);

// The tracked state: the largest-kappa pole, which drifts monotonically
// toward the sqrt(-V0) ceiling as n grows.
BoundState parallel_wells_bound_state(int n, double depth_ev,
                                      double width_nm);

// Two-column text file "xi_nm v_ev" on a strictly increasing uniform grid
// (relative tolerance 1e-9 on spacing). Throws IoError on malformed input.
Tabulated load_tabulated_potential(const std::string& path);

// Piecewise-linear evaluation of a descriptor's potential at xi (nm), with
// V = 0 outside the support. CompositeRing has no pointwise potential.
double potential_value(const PotentialDescriptor& potential, double xi);

}  // namespace qg
