#include "qg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "qg/spectrum.hpp"
#include "wave_detail.hpp"

namespace qg {

namespace {

constexpr cplxl kI(0.0L, 1.0L);

long double lmat2_scale(const LongMat2& m) {
    return std::max(std::max(std::abs(m.m11), std::abs(m.m12)),
                    std::max(std::abs(m.m21), std::abs(m.m22)));
}

// Shared tail of every edge builder: narrows the matrices and derives the
// derivative rows psi'(v)/(ik) from them. The row algebra is generic:
//   J1_j = (q/k) (g1_1j - g1_2j) - (gauge/k) delta_{j1}
//   J2_j = (q/k) e^{-i gauge l} (e^{iql} g2_1j - e^{-iql} g2_2j)
//          - (gauge/k) delta_{j2}
// covering free arms (q = k), flux arms (gauge term), full-width steps
// (q != k) and embedded maps (outer basis k) alike.
GammaPair finalize_pair(const LongMat2& g1, const LongMat2& g2, cplxl q,
                        long double gauge, long double l, long double k,
                        double lo, double hi) {
    GammaPair p;
    p.g1l = g1;
    p.g2l = g2;
    p.g1 = lmat2_narrow(g1);
    p.g2 = lmat2_narrow(g2);
    p.basis_ql = q;
    p.basis_q = cplx(q);
    p.gauge = static_cast<double>(gauge);
    p.support_lo = lo;
    p.support_hi = hi;
    const cplxl w = q / k;
    const cplxl eql = std::exp(kI * q * l);
    const cplxl gph = std::exp(-kI * gauge * l);
    const long double ga_k = gauge / k;
    p.j1l[0] = w * (g1.m11 - g1.m21) - ga_k;
    p.j1l[1] = w * (g1.m12 - g1.m22);
    p.j2l[0] = w * gph * (eql * g2.m11 - g2.m21 / eql);
    p.j2l[1] = w * gph * (eql * g2.m12 - g2.m22 / eql) - ga_k;
    p.j1 = {cplx(p.j1l[0]), cplx(p.j1l[1])};
    p.j2 = {cplx(p.j2l[0]), cplx(p.j2l[1])};
    return p;
}

// Edge whose basis {e^{i q xi}, e^{-i q xi}} spans the whole length, with
// an optional flux gauge (psi = e^{-i gauge xi} phi): continuity at both
// ends fixes (a, b) directly and g1 = g2.
GammaPair build_uniform(cplxl q, long double gauge, long double l,
                        long double k) {
    const cplxl sq = std::sin(q * l);
    if (std::abs(sq) < 1e-12L) {
        throw EdgeResonanceSingularity(
            "edge basis phase hits sin = 0 at k = " +
            std::to_string(static_cast<double>(k)));
    }
    const cplxl denom = 2.0L * kI * sq;
    const cplxl eiql = std::exp(kI * q * l);
    const cplxl gph = std::exp(kI * gauge * l);
    const LongMat2 g{-1.0L / eiql / denom, gph / denom, eiql / denom,
                     -gph / denom};
    return finalize_pair(g, g, q, gauge, l, k, 0.0, 0.0);
}

// Edge with an embedded right-to-left coefficient map M on an inner window:
// plane waves in k outside it. The right pair (c, d) solves the two vertex
// continuity equations exactly; g1 = M g2 then holds by construction.
GammaPair build_embedded(const LongMat2& m, long double l, long double k,
                         double lo, double hi, const char* what) {
    const long double scale = std::max(1.0L, lmat2_scale(m));
    if (std::abs(lmat2_det(m) - 1.0L) > 1e-8L * scale * scale) {
        throw ConfigError(std::string(what) +
                          ": embedded map must be unimodular");
    }
    if (std::abs(m.m22 - std::conj(m.m11)) > 1e-8L * scale ||
        std::abs(m.m21 - std::conj(m.m12)) > 1e-8L * scale) {
        throw ConfigError(std::string(what) +
                          ": embedded map must be time-reversal symmetric");
    }
    const cplxl emikl = std::exp(-kI * k * l);
    const cplxl eikl = 1.0L / emikl;
    const cplxl d = (m.m11 + m.m21) * emikl - (m.m12 + m.m22) * eikl;
    if (std::abs(d) < 1e-12L * scale) {
        throw EdgeResonanceSingularity(
            std::string(what) + ": embedded map hits an edge resonance");
    }
    const LongMat2 g2{emikl / d, -(m.m12 + m.m22) / d, -eikl / d,
                      (m.m11 + m.m21) / d};
    return finalize_pair(lmat2_mul(m, g2), g2, cplxl(k), 0.0L, l, k, lo, hi);
}

bool spans_whole_edge(double width, double length) {
    return std::abs(width - length) <= 1e-12 * std::max(1.0, length);
}

GammaPair build_step_edge(double v0_ev, double width, long double l,
                          long double k) {
    const long double v0 =
        static_cast<long double>(v0_ev) / Units::hbar2_over_2m;
    if (spans_whole_edge(width, static_cast<double>(l))) {
        const cplxl q = sqrt_im_pos(cplxl(k * k - v0, 0.0L));
        return build_uniform(q, 0.0L, l, k);
    }
    const long double x0 = (l - width) / 2.0L;
    const LongMat2 m = detail::shift_scatterer(
        detail::square_step_matrix(v0, width, k), k, x0);
    return build_embedded(m, l, k, static_cast<double>(x0),
                          static_cast<double>(x0 + width), "square step");
}

GammaPair build_tabulated_edge(const EdgeSpec& edge, const Tabulated& tab,
                               long double l, WaveNumber k) {
    const double xa = tab.xi_nm.front();
    const double xb = tab.xi_nm.back();
    const SolutionPair sp =
        integrate_solutions(edge.potential, k_to_ev(k.k), {xa, xb, 2e-4});
    const LongMat2 phi{sp.u2, sp.v2, sp.up2, sp.vp2};
    const LongMat2 m =
        lmat2_mul(detail::wave_columns_inv(cplxl(k.k), xa),
                  lmat2_mul(lmat2_inv(phi),
                            detail::wave_columns(cplxl(k.k), xb)));
    return build_embedded(m, l, k.k, xa, xb, "tabulated potential");
}

ScatteringResult extract_amplitudes(const GammaSystem& sys,
                                    const VertexAmplitudes& v) {
    switch (sys.preset) {
        case ScatteringPreset::LeftScattering:
            return make_result(cplx(v.psi2l), cplx(v.psi1l - 1.0L));
        case ScatteringPreset::RightScattering:
            return make_result(cplx(v.psi1l), cplx(v.psi2l - 1.0L));
        case ScatteringPreset::Jost1: {
            // Lead 1 carries a_in e^{ikx} + b_in e^{-ikx}; the unit-outgoing
            // normalization on lead 2 makes t = 1/a_in, r = b_in/a_in.
            const cplxl s = sys.sj1[0] * v.psi1l + sys.sj1[1] * v.psi2l;
            const cplxl a_in = (v.psi1l + s) / 2.0L;
            const cplxl b_in = (v.psi1l - s) / 2.0L;
            if (std::abs(a_in) < 1e-14L * std::max(1.0L, std::abs(b_in))) {
                throw SingularGamma("vanishing incident normalization");
            }
            return make_result(cplx(1.0L / a_in), cplx(b_in / a_in));
        }
        case ScatteringPreset::Jost2: {
            // Lead 2 carries inc e^{-ikx} + out e^{+ikx} (x away from the
            // graph); unit outgoing on lead 1 makes t = 1/inc.
            const cplxl s = sys.sj2[0] * v.psi1l + sys.sj2[1] * v.psi2l;
            const cplxl inc = (v.psi2l - s) / 2.0L;
            const cplxl out = (v.psi2l + s) / 2.0L;
            if (std::abs(inc) < 1e-14L * std::max(1.0L, std::abs(out))) {
                throw SingularGamma("vanishing incident normalization");
            }
            return make_result(cplx(1.0L / inc), cplx(out / inc));
        }
    }
    throw ConfigError("unknown scattering preset");
}

EdgeWaveField field_from_pair(const GammaPair& p, const VertexAmplitudes& v,
                              double length, int edge_index) {
    EdgeWaveField f;
    f.edge_index = edge_index;
    f.a = cplx(p.g1l.m11 * v.psi1l + p.g1l.m12 * v.psi2l);
    f.b = cplx(p.g1l.m21 * v.psi1l + p.g1l.m22 * v.psi2l);
    f.c = cplx(p.g2l.m11 * v.psi1l + p.g2l.m12 * v.psi2l);
    f.d = cplx(p.g2l.m21 * v.psi1l + p.g2l.m22 * v.psi2l);
    f.q = p.basis_q;
    f.gauge = p.gauge;
    f.length = length;
    f.support_lo = p.support_lo;
    f.support_hi = p.support_hi;
    return f;
}

}  // namespace

GammaPair gamma_pair_for_edge(const EdgeSpec& edge, WaveNumber k,
                              double flux_alpha) {
    if (!(k.k > 0.0)) throw ConfigError("wave number must be positive");
    const long double l = edge.length_nm;
    const long double kk = k.k;
    const long double gauge =
        static_cast<long double>(edge.ab_sign) * flux_alpha;
    if (gauge != 0.0L && !std::holds_alternative<Free>(edge.potential)) {
        throw ConfigError("flux arms must be potential-free");
    }
    if (std::holds_alternative<Free>(edge.potential)) {
        return build_uniform(cplxl(kk), gauge, l, kk);
    }
    if (const auto* w = std::get_if<SquareWell>(&edge.potential)) {
        return build_step_edge(w->depth_ev, w->width_nm, l, kk);
    }
    if (const auto* b = std::get_if<SquareBarrier>(&edge.potential)) {
        return build_step_edge(b->height_ev, b->width_nm, l, kk);
    }
    if (const auto* c = std::get_if<CompositeRing>(&edge.potential)) {
        if (std::abs(c->t) < 1e-12) {
            throw ZeroTransmission(
                "embedded scatterer sits on a transmission zero");
        }
        const LongMat2 m = detail::point_scatterer_matrix(
            cplxl(c->t), cplxl(c->r), kk, l / 2.0L);
        return build_embedded(m, l, kk, static_cast<double>(l) / 2.0,
                              static_cast<double>(l) / 2.0,
                              "embedded scatterer");
    }
    const auto& tab = std::get<Tabulated>(edge.potential);
    return build_tabulated_edge(edge, tab, l, k);
}

GammaSystem assemble_gamma(const TwoTerminalGraph& graph, WaveNumber k) {
    validate_graph(graph);
    GammaSystem sys;
    sys.k = k;
    sys.preset = graph.boundary;
    sys.pairs.reserve(graph.edges.size());
    for (std::size_t i = 0; i < graph.edges.size(); ++i) {
        GammaPair p = gamma_pair_for_edge(graph.edges[i], k, graph.flux_alpha);
        p.edge_index = static_cast<int>(i);
        sys.sj1[0] += p.j1l[0];
        sys.sj1[1] += p.j1l[1];
        sys.sj2[0] += p.j2l[0];
        sys.sj2[1] += p.j2l[1];
        sys.pairs.push_back(std::move(p));
    }
    // Rows come from eliminating the lead coefficients: continuity fixes
    // the lead values at the terminals, the Kirchhoff sums fix the lead
    // derivatives, and the prescribed pair of boundary data per preset
    // turns the two vertex conditions into Gamma Psi = F.
    switch (sys.preset) {
        case ScatteringPreset::LeftScattering:
            sys.gammal = LongMat2{1.0L + sys.sj1[0], sys.sj1[1], sys.sj2[0],
                                  sys.sj2[1] - 1.0L};
            sys.fl = {2.0L, 0.0L};
            break;
        case ScatteringPreset::RightScattering:
            sys.gammal = LongMat2{1.0L + sys.sj1[0], sys.sj1[1], sys.sj2[0],
                                  sys.sj2[1] - 1.0L};
            sys.fl = {0.0L, -2.0L};
            break;
        case ScatteringPreset::Jost1:
            sys.gammal = LongMat2{sys.sj2[0], 1.0L + sys.sj2[1], -sys.sj2[0],
                                  1.0L - sys.sj2[1]};
            sys.fl = {2.0L, 0.0L};
            break;
        case ScatteringPreset::Jost2:
            sys.gammal = LongMat2{1.0L + sys.sj1[0], sys.sj1[1],
                                  1.0L - sys.sj1[0], -sys.sj1[1]};
            sys.fl = {0.0L, 2.0L};
            break;
    }
    sys.gamma = lmat2_narrow(sys.gammal);
    sys.f = {cplx(sys.fl[0]), cplx(sys.fl[1])};
    return sys;
}

VertexAmplitudes solve_vertex_amplitudes(const GammaSystem& sys) {
    const LongMat2& g = sys.gammal;
    const cplxl det = lmat2_det(g);
    const long double scale = lmat2_scale(g);
    if (std::abs(det) < 1e-12L * std::max(scale, 1e-300L)) {
        throw SingularGamma("det Gamma vanishes at k = " +
                            std::to_string(sys.k.k));
    }
    VertexAmplitudes v;
    v.psi1l = (g.m22 * sys.fl[0] - g.m12 * sys.fl[1]) / det;
    v.psi2l = (g.m11 * sys.fl[1] - g.m21 * sys.fl[0]) / det;
    v.psi1 = cplx(v.psi1l);
    v.psi2 = cplx(v.psi2l);
    const long double r1 =
        std::abs(g.m11 * v.psi1l + g.m12 * v.psi2l - sys.fl[0]);
    const long double r2 =
        std::abs(g.m21 * v.psi1l + g.m22 * v.psi2l - sys.fl[1]);
    v.residual = static_cast<double>(std::max(r1, r2));
    return v;
}

ScatteringResult amplitudes_from_gamma(const GammaSystem& sys) {
    return extract_amplitudes(sys, solve_vertex_amplitudes(sys));
}

cplx EdgeWaveField::value(double xi) const {
    const cplx i(0.0, 1.0);
    const bool windowed = support_hi > support_lo;
    if (windowed && xi > support_lo && xi < support_hi) {
        throw ConfigError(
            "field inside an embedded scattering window is not represented");
    }
    const cplx e = std::exp(i * q * xi);
    if (windowed && xi >= support_hi) {
        return c * e + d / e;
    }
    return std::exp(-i * gauge * xi) * (a * e + b / e);
}

cplx EdgeWaveField::derivative(double xi) const {
    const cplx i(0.0, 1.0);
    const bool windowed = support_hi > support_lo;
    if (windowed && xi > support_lo && xi < support_hi) {
        throw ConfigError(
            "field inside an embedded scattering window is not represented");
    }
    const cplx e = std::exp(i * q * xi);
    if (windowed && xi >= support_hi) {
        return i * q * (c * e - d / e);
    }
    const cplx phi = a * e + b / e;
    const cplx dphi = i * q * (a * e - b / e);
    return std::exp(-i * gauge * xi) * (dphi - i * gauge * phi);
}

EdgeWaveField edge_wavefunction(const VertexAmplitudes& psi,
                                const EdgeSpec& edge, WaveNumber k,
                                double flux_alpha, int edge_index) {
    const GammaPair p = gamma_pair_for_edge(edge, k, flux_alpha);
    return field_from_pair(p, psi, edge.length_nm, edge_index);
}

double edge_current(const VertexAmplitudes& psi, const EdgeSpec& edge,
                    WaveNumber k, double flux_alpha) {
    const GammaPair p = gamma_pair_for_edge(edge, k, flux_alpha);
    const cplxl a = p.g1l.m11 * psi.psi1l + p.g1l.m12 * psi.psi2l;
    const cplxl b = p.g1l.m21 * psi.psi1l + p.g1l.m22 * psi.psi2l;
    // j = Im(conj(phi) phi') at xi = 0 in the gauge-reduced basis, which is
    // the conserved (and, on flux arms, gauge-covariant) current.
    const cplxl dphi = kI * p.basis_ql * (a - b);
    return static_cast<double>(std::imag(std::conj(a + b) * dphi));
}

double arm_current_formula(cplx psi1, cplx psi2, double length_nm,
                           WaveNumber k, double gauge) {
    const double s = std::sin(k.k * length_nm);
    if (std::abs(s) < 1e-12) {
        throw EdgeResonanceSingularity("arm current formula: sin(kl) = 0");
    }
    return k.k * std::abs(psi1) * std::abs(psi2) *
           std::sin(std::arg(psi2) + gauge * length_nm - std::arg(psi1)) / s;
}

ScatteringResult solve_graph(const TwoTerminalGraph& graph, WaveNumber k) {
    return amplitudes_from_gamma(assemble_gamma(graph, k));
}

GraphSolution solve_graph_full(const TwoTerminalGraph& graph, WaveNumber k) {
    GraphSolution out;
    out.system = assemble_gamma(graph, k);
    out.psi = solve_vertex_amplitudes(out.system);
    out.amplitudes = extract_amplitudes(out.system, out.psi);
    out.fields.reserve(out.system.pairs.size());
    for (const auto& p : out.system.pairs) {
        out.fields.push_back(field_from_pair(
            p, out.psi, graph.edges[p.edge_index].length_nm, p.edge_index));
    }
    return out;
}

}  // namespace qg
