// Internal extended-precision helpers for plane-wave coefficient matching.
// Shared by the transfer-matrix and vertex-amplitude pipelines; not part of
// the public headers.
#pragma once

#include "qg/core.hpp"

namespace qg::detail {

// Column matrix of (psi, psi') for the basis {e^{i kappa x}, e^{-i kappa x}}.
inline LongMat2 wave_columns(cplxl kappa, long double x) {
    const cplxl i(0.0L, 1.0L);
    const cplxl e = std::exp(i * kappa * x);
    const cplxl em = std::exp(-i * kappa * x);
    return LongMat2{e, em, i * kappa * e, -i * kappa * em};
}

// Adjugate of wave_columns over its determinant (-2 i kappa).
inline LongMat2 wave_columns_inv(cplxl kappa, long double x) {
    const cplxl i(0.0L, 1.0L);
    const cplxl e = std::exp(i * kappa * x);
    const cplxl em = std::exp(-i * kappa * x);
    const cplxl two_ik = 2.0L * i * kappa;
    return LongMat2{em / 2.0L, em / two_ik, e / 2.0L, -e / two_ik};
}

// Right-to-left coefficient map across a rectangular step of the given
// width starting at x = 0, in the global frame: (a,b) = M (c,d) with
// psi = a e^{ikx} + b e^{-ikx} on both sides. depth -> 0 gives the
// identity exactly; a barrier runs through the evanescent branch of q.
inline LongMat2 square_step_matrix(long double v0_units, long double width,
                                   long double k) {
    if (v0_units == 0.0L) return lmat2_identity();
    const cplxl q = sqrt_im_pos(cplxl(k * k - v0_units, 0.0L));
    return lmat2_mul(
        wave_columns_inv(cplxl(k), 0.0L),
        lmat2_mul(wave_columns(q, 0.0L),
                  lmat2_mul(wave_columns_inv(q, width),
                            wave_columns(cplxl(k), width))));
}

// Conjugation by diag(e^{ik x0}, e^{-ik x0}): moves a global-frame map
// whose scatterer starts at x = 0 so that it starts at x = x0 instead.
inline LongMat2 shift_scatterer(const LongMat2& m, long double k,
                                long double x0) {
    const cplxl i(0.0L, 1.0L);
    const cplxl e = std::exp(i * k * x0);
    const cplxl em = 1.0L / e;
    return LongMat2{m.m11, m.m12 * em * em, m.m21 * e * e, m.m22};
}

// Right-to-left map of a zero-width scatterer sitting at x = x0, built from
// its own-frame amplitudes (t0, r0): the reflection picks up the x0 path
// phase, giving M = [[1/t0, conj(r0/t0) e^{-2ikx0}], [(r0/t0) e^{2ikx0},
// conj(1/t0)]].
inline LongMat2 point_scatterer_matrix(cplxl t0, cplxl r0, long double k,
                                       long double x0) {
    const cplxl i(0.0L, 1.0L);
    const cplxl phase = std::exp(2.0L * i * k * x0);
    const cplxl rt = r0 / t0;
    return LongMat2{1.0L / t0, std::conj(rt) / phase, rt * phase,
                    1.0L / std::conj(t0)};
}

}  // namespace qg::detail
