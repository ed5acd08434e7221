#include "qg/core.hpp"

#include <limits>

namespace qg {

WaveNumber ev_to_k(double energy_ev) {
    if (!(energy_ev > 0.0)) {
        throw NegativeEnergy("ev_to_k requires E > 0, got " +
                             std::to_string(energy_ev));
    }
    return WaveNumber{std::sqrt(energy_ev / Units::hbar2_over_2m)};
}

double k_to_ev(double k) { return Units::hbar2_over_2m * k * k; }

cplx sqrt_im_pos(cplx z) {
    cplx w = std::sqrt(z);
    if (w.imag() < 0.0 || (w.imag() == 0.0 && w.real() < 0.0)) w = -w;
    return w;
}

cplxl sqrt_im_pos(cplxl z) {
    cplxl w = std::sqrt(z);
    if (w.imag() < 0.0L || (w.imag() == 0.0L && w.real() < 0.0L)) w = -w;
    return w;
}

ComplexMat2 mat2_mul(const ComplexMat2& a, const ComplexMat2& b) {
    return ComplexMat2{a.m11 * b.m11 + a.m12 * b.m21,
                       a.m11 * b.m12 + a.m12 * b.m22,
                       a.m21 * b.m11 + a.m22 * b.m21,
                       a.m21 * b.m12 + a.m22 * b.m22};
}

cplx mat2_det(const ComplexMat2& a) { return a.m11 * a.m22 - a.m12 * a.m21; }

ComplexMat2 mat2_inv(const ComplexMat2& a) {
    const cplx det = mat2_det(a);
    if (std::abs(det) < 1e-300) {
        throw SingularMatrix("mat2_inv: |det| = " +
                             std::to_string(std::abs(det)));
    }
    return ComplexMat2{a.m22 / det, -a.m12 / det, -a.m21 / det, a.m11 / det};
}

bool mat2_finite(const ComplexMat2& a) {
    auto ok = [](cplx z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    };
    return ok(a.m11) && ok(a.m12) && ok(a.m21) && ok(a.m22);
}

ComplexMat2 mat2_identity() { return ComplexMat2{1.0, 0.0, 0.0, 1.0}; }

LongMat2 lmat2_mul(const LongMat2& a, const LongMat2& b) {
    return LongMat2{a.m11 * b.m11 + a.m12 * b.m21,
                    a.m11 * b.m12 + a.m12 * b.m22,
                    a.m21 * b.m11 + a.m22 * b.m21,
                    a.m21 * b.m12 + a.m22 * b.m22};
}

cplxl lmat2_det(const LongMat2& a) { return a.m11 * a.m22 - a.m12 * a.m21; }

LongMat2 lmat2_inv(const LongMat2& a) {
    const cplxl det = lmat2_det(a);
    if (std::abs(det) < 1e-4000L) {
        throw SingularMatrix("lmat2_inv: determinant underflow");
    }
    return LongMat2{a.m22 / det, -a.m12 / det, -a.m21 / det, a.m11 / det};
}

LongMat2 lmat2_identity() { return LongMat2{1.0L, 0.0L, 0.0L, 1.0L}; }

ComplexMat2 lmat2_narrow(const LongMat2& a) {
    return ComplexMat2{cplx(a.m11), cplx(a.m12), cplx(a.m21), cplx(a.m22)};
}

LongMat2 lmat2_widen(const ComplexMat2& a) {
    return LongMat2{cplxl(a.m11), cplxl(a.m12), cplxl(a.m21), cplxl(a.m22)};
}

namespace {

void validate_edge(const EdgeSpec& e, bool has_flux) {
    if (!(e.length_nm > 0.0)) {
        throw ConfigError("edge length must be positive");
    }
    if (e.ab_sign != -1 && e.ab_sign != 0 && e.ab_sign != 1) {
        throw ConfigError("ab_sign must be -1, 0, or +1");
    }
    if (!has_flux && e.ab_sign != 0) {
        throw ConfigError("ab_sign set on an edge but no flux is configured");
    }
    if (const auto* w = std::get_if<SquareWell>(&e.potential)) {
        if (!(w->depth_ev < 0.0)) throw ConfigError("well depth must be < 0");
        if (!(w->width_nm > 0.0) || w->width_nm > e.length_nm + 1e-12) {
            throw ConfigError("well width must lie in (0, edge length]");
        }
    } else if (const auto* b = std::get_if<SquareBarrier>(&e.potential)) {
        if (!(b->height_ev > 0.0)) {
            throw ConfigError("barrier height must be > 0");
        }
        if (!(b->width_nm > 0.0) || b->width_nm > e.length_nm + 1e-12) {
            throw ConfigError("barrier width must lie in (0, edge length]");
        }
    } else if (const auto* t = std::get_if<Tabulated>(&e.potential)) {
        if (t->xi_nm.size() < 2 || t->xi_nm.size() != t->v_ev.size()) {
            throw ConfigError("tabulated potential needs >= 2 matched samples");
        }
        if (!(t->xi_nm.front() > 0.0) ||
            !(t->xi_nm.back() < e.length_nm)) {
            throw ConfigError(
                "tabulated support must lie strictly inside the edge");
        }
    } else if (const auto* c = std::get_if<CompositeRing>(&e.potential)) {
        const double flux = std::norm(c->t) + std::norm(c->r);
        if (std::abs(flux - 1.0) > 1e-8) {
            throw ConfigError(
                "composite scatterer must satisfy |t|^2 + |r|^2 = 1");
        }
    }
}

}  // namespace

void validate_graph(const TwoTerminalGraph& graph) {
    if (graph.edges.empty()) {
        throw ConfigError("graph needs at least one edge");
    }
    const bool has_flux = graph.flux_alpha != 0.0;
    for (const auto& e : graph.edges) validate_edge(e, has_flux);
    if (has_flux) {
        if (graph.edges.size() != 2 || graph.edges[0].ab_sign * graph.edges[1].ab_sign != -1) {
            throw ConfigError(
                "flux requires exactly two arms with opposite ab_sign");
        }
    }
}

ScatteringResult make_result(cplx t, cplx r) {
    return ScatteringResult{t, r, std::norm(t), std::norm(r)};
}

}  // namespace qg
