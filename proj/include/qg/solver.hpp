// The vertex-amplitudes engine: per-edge coefficient matrices, assembly of
// the 2x2 system Gamma Psi = F for a chosen boundary preset, its adjugate
// solve, and reconstruction of edge wave functions and probability currents.
#pragma once

#include <array>
#include <vector>

#include "qg/core.hpp"

namespace qg {

// Per-edge coefficient matrices in the edge coordinate xi in [0, l]
// (xi = 0 at the left terminal). g1 maps the vertex values (Psi1, Psi2) to
// the plane-wave pair (a, b) valid left of the scattering region; g2 maps
// them to the pair (c, d) valid right of it, in the same global frame.
// For an edge whose basis spans the whole length (free, flux arm,
// full-width step) g1 = g2 and the support window is empty.
struct GammaPair {
    int edge_index = 0;
    ComplexMat2 g1;
    ComplexMat2 g2;
    // psi'(0)/(ik) and psi'(l)/(ik) as linear forms in (Psi1, Psi2).
    std::array<cplx, 2> j1{}, j2{};
    cplx basis_q;        // wave number of the coefficient basis
    double gauge = 0.0;  // flux phase gradient on this edge (s * alpha)
    // Inner window where the (a,b)/(c,d) forms do not represent the field.
    double support_lo = 0.0, support_hi = 0.0;
    // Extended-precision copies consumed by assembly.
    LongMat2 g1l, g2l;
    std::array<cplxl, 2> j1l{}, j2l{};
    cplxl basis_ql;
};

// The assembled linear system Gamma Psi = F plus everything needed to
// recover scattering amplitudes and per-edge fields afterwards.
struct GammaSystem {
    ComplexMat2 gamma;
    std::array<cplx, 2> f{};
    WaveNumber k{};
    ScatteringPreset preset = ScatteringPreset::LeftScattering;
    std::vector<GammaPair> pairs;
    // Summed derivative rows over all edges (extended precision).
    std::array<cplxl, 2> sj1{}, sj2{};
    LongMat2 gammal;
    std::array<cplxl, 2> fl{};
};

struct VertexAmplitudes {
    cplx psi1, psi2;
    double residual = 0.0;  // ||Gamma Psi - F||_inf of the solve
    cplxl psi1l, psi2l;
};

// The reconstructed field on one edge. value()/derivative() evaluate
// psi(xi) = e^{-i gauge xi} (a e^{i q xi} + b e^{-i q xi}) left of the
// support window and the (c, d) form right of it; inside a non-empty
// window the coefficients do not represent the field and both throw
// ConfigError. At the seam of a zero-width window the left form wins.
struct EdgeWaveField {
    int edge_index = 0;
    cplx a, b;  // left-form coefficients
    cplx c, d;  // right-form coefficients (equal to a, b when uniform)
    cplx q;     // basis wave number
    double gauge = 0.0;
    double length = 0.0;
    double support_lo = 0.0, support_hi = 0.0;

    cplx value(double xi) const;
    cplx derivative(double xi) const;
};

// Coefficient matrices and derivative rows of a single edge. flux_alpha is
// the graph-level flux parameter; the edge's ab_sign selects its gauge
// orientation. Throws EdgeResonanceSingularity when the basis phase hits
// sin = 0 (coefficients diverge; the caller may skip or nudge k) and
// ConfigError for invalid combinations (flux on a potential edge, k <= 0).
GammaPair gamma_pair_for_edge(const EdgeSpec& edge, WaveNumber k,
                              double flux_alpha);

// Validates the graph, builds every edge pair, sums the derivative rows,
// and forms Gamma and F for the graph's boundary preset.
GammaSystem assemble_gamma(const TwoTerminalGraph& graph, WaveNumber k);

// Adjugate solve of the 2x2 system (for left scattering this is
// Psi1 = 2 Gamma22/det, Psi2 = -2 Gamma21/det). Throws SingularGamma when
// |det Gamma| < 1e-12 * ||Gamma|| (isolated k; report and skip).
VertexAmplitudes solve_vertex_amplitudes(const GammaSystem& sys);

// Scattering amplitudes for the system's preset: left/right presets read
// them off the vertex values; the outgoing-normalized presets reconstruct
// the incident and reflected lead coefficients from the derivative rows.
ScatteringResult amplitudes_from_gamma(const GammaSystem& sys);

// Field on one edge given solved vertex amplitudes. edge_index is carried
// into the result for bookkeeping only.
EdgeWaveField edge_wavefunction(const VertexAmplitudes& psi,
                                const EdgeSpec& edge, WaveNumber k,
                                double flux_alpha = 0.0, int edge_index = 0);

// Steady-state probability current through the edge, positive from the
// left terminal to the right one, in units of nm^-1 (a factor hbar/m is
// left out, matching k |t|^2 for the transmitted current). On flux arms
// this is the gauge-covariant current. Constant along the edge.
double edge_current(const VertexAmplitudes& psi, const EdgeSpec& edge,
                    WaveNumber k, double flux_alpha = 0.0);

// Same current from the closed endpoint formula valid on uniform-basis
// arms: j = k |Psi1||Psi2| sin(arg Psi2 + gauge*l - arg Psi1) / sin(kl).
double arm_current_formula(cplx psi1, cplx psi2, double length_nm,
                           WaveNumber k, double gauge = 0.0);

// One-call pipeline: validate, assemble, solve, extract.
ScatteringResult solve_graph(const TwoTerminalGraph& graph, WaveNumber k);

struct GraphSolution {
    GammaSystem system;
    VertexAmplitudes psi;
    ScatteringResult amplitudes;
    std::vector<EdgeWaveField> fields;
};

// Full pipeline that also reconstructs every edge field.
GraphSolution solve_graph_full(const TwoTerminalGraph& graph, WaveNumber k);

}  // namespace qg
