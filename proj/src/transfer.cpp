#include "qg/transfer.hpp"

#include <cmath>

#include "wave_detail.hpp"

namespace qg {

TransferMatrix m_from_amplitudes(cplx t, cplx r, WaveNumber k) {
    if (std::abs(t) < 1e-12) {
        throw ZeroTransmission("m_from_amplitudes: |t| = " +
                               std::to_string(std::abs(t)));
    }
    const cplx inv_t = 1.0 / t;
    const cplx rt = r / t;
    return TransferMatrix{
        ComplexMat2{inv_t, rt, std::conj(rt), std::conj(inv_t)}, k};
}

ScatteringResult amplitudes_from_m(const TransferMatrix& m) {
    const cplx t = 1.0 / m.m.m11;
    const cplx r = m.m.m12 / m.m.m11;
    return make_result(t, r);
}

TransferMatrix m_square_well(double depth_ev, double width_nm, WaveNumber k) {
    if (!(width_nm > 0.0)) throw ConfigError("step width must be positive");
    if (!(k.k > 0.0)) throw ConfigError("wave number must be positive");
    const long double v0 =
        static_cast<long double>(depth_ev) / Units::hbar2_over_2m;
    // square_step_matrix maps coefficients right-to-left; the coefficient-map
    // convention used by amplitudes_from_m is its transpose.
    const ComplexMat2 raw =
        lmat2_narrow(detail::square_step_matrix(v0, width_nm, k.k));
    return TransferMatrix{ComplexMat2{raw.m11, raw.m21, raw.m12, raw.m22}, k};
}

TransferMatrix m_free_segment(double length_nm, WaveNumber k) {
    if (length_nm < 0.0) throw ConfigError("segment length must be >= 0");
    const cplx e = std::exp(cplx(0.0, -k.k * length_nm));
    return TransferMatrix{ComplexMat2{e, 0.0, 0.0, std::conj(e)}, k};
}

TransferMatrix m_compose(const std::vector<TransferMatrix>& chain) {
    if (chain.empty()) throw ConfigError("m_compose: empty chain");
    const double k0 = chain.front().k.k;
    ComplexMat2 acc = mat2_identity();
    for (const auto& m : chain) {
        if (std::abs(m.k.k - k0) > 1e-12) {
            throw MixedWaveNumber("m_compose: k = " + std::to_string(m.k.k) +
                                  " vs " + std::to_string(k0));
        }
        acc = mat2_mul(acc, m.m);
    }
    return TransferMatrix{acc, WaveNumber{k0}};
}

}  // namespace qg
