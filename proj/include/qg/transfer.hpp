// Transfer-matrix construction and composition: maps of plane-wave
// coefficient pairs across scatterers, analytic rectangular-step matrices,
// free-segment propagation, and ordered chain products.
#pragma once

#include <vector>

#include "qg/core.hpp"

namespace qg {

// Plane-wave coefficient map of a scatterer: m11 = 1/t and m12 = r/t for a
// single element, chains multiply left to right, and 1/(product).m11 is the
// chain transmission. For a real potential at real k: m22 = conj(m11),
// m21 = conj(m12), and |m11|^2 - |m12|^2 = 1 (det = 1).
// The reflection recovered from a composed chain carries the phase of the
// mirrored chain; its modulus is convention-free.
struct TransferMatrix {
    ComplexMat2 m;
    WaveNumber k;
};

// M = [[1/t, r/t], [conj(r/t), conj(1/t)]] for a scatterer with known
// amplitudes, both referenced to the scatterer's own location.
// Throws ZeroTransmission when |t| < 1e-12: near a transmission zero the
// entries diverge and would silently corrupt chain products.
TransferMatrix m_from_amplitudes(cplx t, cplx r, WaveNumber k);

// Round trip of m_from_amplitudes: t = 1/m11, r = m12/m11.
ScatteringResult amplitudes_from_m(const TransferMatrix& m);

// Rectangular potential step of the given width starting at x = 0, in the
// global frame (depth -> 0 yields the identity exactly). depth_ev < 0 is a
// well; depth_ev > 0 is a barrier, handled by the same formula through the
// evanescent branch of q = sqrt(k^2 - V0).
TransferMatrix m_square_well(double depth_ev, double width_nm, WaveNumber k);

// diag(e^{-ikl}, e^{+ikl}): propagation along a potential-free lead.
TransferMatrix m_free_segment(double length_nm, WaveNumber k);

// Ordered product chain[0] * chain[1] * ... The chain transmission is
// t = 1/m11 of the result. Throws MixedWaveNumber when the elements were
// built at wave numbers differing by more than 1e-12.
TransferMatrix m_compose(const std::vector<TransferMatrix>& chain);

}  // namespace qg
