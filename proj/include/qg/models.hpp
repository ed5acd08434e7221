// Closed-form two-arm ring models: transmission/reflection amplitudes,
// flux physics, resonance classification with width extraction, iterated
// (order-dependent) limit probes, and ring-chain composition.
#pragma once

#include <functional>
#include <vector>

#include "qg/core.hpp"

namespace qg {

// Two arms of lengths l1, l2 joining the two terminals; alpha is the flux
// phase gradient in 1/nm (arm 1 carries sign +1, arm 2 sign -1).
struct RingSpec {
    double l1_nm = 1.0;
    double l2_nm = 1.0;
    double alpha = 0.0;
    double L() const { return l1_nm + l2_nm; }
};

enum class ResonanceKind { FullTransmission, SuppressedTransmission };

struct ResonanceReport {
    ResonanceKind kind = ResonanceKind::FullTransmission;
    int n_index = 0;
    double k_res = 0.0;
    // |omega| for full-transmission entries, measured dip FWHM otherwise.
    double width = 0.0;
    // Local-model parameters t(k_res + dk) ~ beta dk / (dk + omega);
    // zero for suppressed-transmission entries.
    cplx beta;
    cplx omega;
};

struct DipWidth {
    double fwhm = 0.0;
    // Half of the lower shoulder plateau, the level the crossings solve for.
    double level = 0.0;
};

// Graph builders. The ring gets flux arm signs only when alpha != 0.
TwoTerminalGraph make_ring_graph(const RingSpec& spec);
TwoTerminalGraph make_parallel_wells_graph(int n_wells, double depth_ev,
                                           double length_nm);

// Equal-arm ring, both arms of length l:
//   t = 4i / (5 sin kl + 4i cos kl),  r = -3 sin kl / (5 sin kl + 4i cos kl).
cplx ring_t_symmetric(double l_nm, WaveNumber k);
cplx ring_r_symmetric(double l_nm, WaveNumber k);

// General two-arm ring with optional flux, in the singularity-free form
// (all trig poles cleared):
//   D  = -3 sx sy - 2i sin(x+y) + 2 cx cy - 2 cos(alpha L)
//   t  = -2i (e^{-i alpha l1} sy + e^{i alpha l2} sx) / D
//   r  = -2 (sx sy + i sin(x+y)) / D - 1
// with x = k l1, y = k l2. Throws SingularGamma when |D| vanishes (the
// removable crossings where the amplitudes have no unique limit).
ScatteringResult ring_amplitudes_asymmetric(const RingSpec& spec,
                                            WaveNumber k);

// Local model of the n-th full-transmission dip at k_n = 2 pi n / L,
// x0 = k_n l1:
//   beta  = 4 L cos x0 / (4 L - i (l2 - l1) sin 2 x0)
//   omega = 2i sin^2 x0 / (4 L - i (l2 - l1) sin 2 x0)
//   t(k_n + dk) ~ beta dk / (dk + omega)
cplx ftr_beta(const RingSpec& spec, int n);
cplx ftr_omega(const RingSpec& spec, int n);
cplx ftr_local_model(double dk, cplx beta, cplx omega);

// Width of a transmission dip at k0, measured against the local shoulder
// plateaus: walk outward with geometrically growing steps to the first
// sampled local maximum on each side, set level = min(plateaus) / 2, and
// bisect for the two crossings. Throws NonConvergent if a shoulder is not
// found within the step cap.
DipWidth measure_dip_fwhm(const std::function<double(double)>& transmission,
                          double k0, double step0 = 1e-6, double grow = 1.05,
                          int cap = 400000);

// All resonances with k_res in [k_min, k_max], sorted by k_res:
//   full-transmission entries at k (l1 + l2) = 2 pi n, width |omega|;
//   suppressed-transmission entries at k |l2 - l1| = (2n + 1) pi, width
//   measured as the dip FWHM.
// Classification is for the flux-free ring; spec.alpha is ignored here.
std::vector<ResonanceReport> find_resonances(const RingSpec& spec,
                                             double k_min, double k_max);

// True iff both k L = 2 pi n (n >= 1) and alpha L = 2 pi m hold within
// 1e-10, the simultaneous conditions for a flux-ring transmission zero.
bool ab_ftr_condition(const RingSpec& spec, WaveNumber k);

// Order of the iterated limits toward a removable crossing. The inner
// variable converges first: KFirst shrinks the arm-phase offset (k toward
// the crossing), LengthFirst the total-phase offset (arm length retuned to
// resonance), AlphaFirst the flux-phase offset.
enum class LimitOrder { KFirst, LengthFirst, AlphaFirst };

// Iterated-limit value of (t, r) at the removable crossing nearest k0,
// probed along shrinking geometric offset sequences with Richardson
// extrapolation. spec.alpha == 0 selects the two-length orders
// (KFirst/LengthFirst); spec.alpha != 0 the flux orders (KFirst/AlphaFirst,
// equal arms required). Throws ConfigError if k0 is not a removable
// crossing of the requested kind, NonConvergent if the extrapolants fail
// the Cauchy test at 1e-5.
ScatteringResult limit_probe(const RingSpec& spec, LimitOrder order,
                             double k0);

// Chain of links.size() + 1 identical rings separated by free segments of
// the given lengths (0 allowed), composed via the coefficient-map product.
// Throws ZeroTransmission when the single ring sits on a transmission zero.
ScatteringResult cascade_amplitudes(const RingSpec& ring,
                                    const std::vector<double>& links_nm,
                                    WaveNumber k);

}  // namespace qg
