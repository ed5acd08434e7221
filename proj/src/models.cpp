#include "qg/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "qg/solver.hpp"
#include "qg/transfer.hpp"

namespace qg {

namespace {

constexpr cplxl kI(0.0L, 1.0L);
constexpr long double kPi = 3.14159265358979323846264338327950288L;

struct TR {
    cplxl t, r;
};

// Pole-free general two-arm form; x = k l1, y = k l2, a1 = alpha l1,
// a2 = alpha l2. All trig poles are cleared by multiplying the eliminated
// linear system through by sin x sin y, so the only failure mode left is
// the removable crossing where the denominator itself vanishes.
TR ring_amplitudes_raw(long double x, long double y, long double a1,
                       long double a2) {
    const long double sx = std::sin(x), cx = std::cos(x);
    const long double sy = std::sin(y), cy = std::cos(y);
    const cplxl dd(-3.0L * sx * sy + 2.0L * cx * cy - 2.0L * std::cos(a1 + a2),
                   -2.0L * std::sin(x + y));
    if (std::abs(dd) < 1e-12L) {
        throw SingularGamma(
            "ring amplitudes undefined at a removable crossing");
    }
    TR out;
    out.t =
        -2.0L * kI * (std::exp(-kI * a1) * sy + std::exp(kI * a2) * sx) / dd;
    out.r = -2.0L * cplxl(sx * sy, std::sin(x + y)) / dd - 1.0L;
    return out;
}

void require_ring(const RingSpec& spec) {
    if (!(spec.l1_nm > 0.0) || !(spec.l2_nm > 0.0)) {
        throw ConfigError("ring arm lengths must be positive");
    }
}

cplxl ftr_denom(const RingSpec& spec, long double x0) {
    return cplxl(4.0L * spec.L(),
                 -(static_cast<long double>(spec.l2_nm) - spec.l1_nm) *
                     std::sin(2.0L * x0));
}

long double ftr_x0(const RingSpec& spec, int n) {
    if (n < 1) throw ConfigError("resonance index must be >= 1");
    return 2.0L * kPi * n * spec.l1_nm / spec.L();
}

// Offset-exact asymmetric-ring evaluator at a removable crossing with
// k l1 = pi n + ex and k (l1 + l2) = 2 pi N + dy; the integer parts are
// folded out analytically so 1e-30-scale offsets stay meaningful.
TR asym_offset(bool odd_n, long double ex, long double dy) {
    const long double sg = odd_n ? -1.0L : 1.0L;
    const long double se = std::sin(ex), ce = std::cos(ex);
    const long double sd = std::sin(dy - ex), cd = std::cos(dy - ex);
    const long double st = std::sin(dy);
    const cplxl dt(1.5L * se * sd - ce * cd + 1.0L, st);
    TR out;
    out.t = cplxl(0.0L, sg) * (se + sd) / dt;
    out.r = cplxl(se * sd, st) / dt - 1.0L;
    return out;
}

// Same for the equal-arm flux ring at k l = pi n0 + d, alpha l = pi m0 + D.
TR ab_offset(bool odd_nm, long double d, long double dd_off) {
    const long double sg = odd_nm ? -1.0L : 1.0L;
    const long double sd = std::sin(d), cd = std::cos(d);
    const long double sD = std::sin(dd_off), cD = std::cos(dd_off);
    const cplxl den(-5.0L * sd * sd + 4.0L * sD * sD, -4.0L * cd * sd);
    TR out;
    out.t = cplxl(0.0L, -4.0L * sg) * cD * sd / den;
    out.r = cplxl(-2.0L * sd * sd, -4.0L * cd * sd) / den - 1.0L;
    return out;
}

// Richardson extrapolation of samples at eps_m = eps0 rho^m, m = 0..4,
// for a function analytic in eps. *head4 receives the 4-point ladder head
// so the caller can run a Cauchy test against the 5-point value.
cplxl richardson5(const std::array<cplxl, 5>& seq, long double rho,
                  cplxl* head4) {
    std::array<cplxl, 5> t = seq;
    for (int r = 1; r < 5; ++r) {
        const long double w = std::pow(rho, static_cast<long double>(r));
        for (int m = 0; m + r < 5; ++m) {
            t[m] = (t[m + 1] - w * t[m]) / (1.0L - w);
        }
        if (r == 3 && head4 != nullptr) *head4 = t[0];
    }
    return t[0];
}

long long near_integer_or_throw(long double value, long double unit,
                                const char* what) {
    const long long q = llroundl(value / unit);
    if (std::abs(value - q * unit) > 1e-9L) throw ConfigError(what);
    return q;
}

}  // namespace

TwoTerminalGraph make_ring_graph(const RingSpec& spec) {
    require_ring(spec);
    const bool flux = spec.alpha != 0.0;
    TwoTerminalGraph g;
    g.edges = {EdgeSpec{spec.l1_nm, Free{}, flux ? 1 : 0},
               EdgeSpec{spec.l2_nm, Free{}, flux ? -1 : 0}};
    g.flux_alpha = spec.alpha;
    g.boundary = ScatteringPreset::LeftScattering;
    return g;
}

TwoTerminalGraph make_parallel_wells_graph(int n_wells, double depth_ev,
                                           double length_nm) {
    if (n_wells < 1) throw ConfigError("need at least one well");
    TwoTerminalGraph g;
    g.edges.assign(static_cast<std::size_t>(n_wells),
                   EdgeSpec{length_nm, SquareWell{depth_ev, length_nm}, 0});
    g.boundary = ScatteringPreset::LeftScattering;
    return g;
}

cplx ring_t_symmetric(double l_nm, WaveNumber k) {
    if (!(l_nm > 0.0) || !(k.k > 0.0)) {
        throw ConfigError("arm length and k must be positive");
    }
    const long double kl = static_cast<long double>(k.k) * l_nm;
    const cplxl den(5.0L * std::sin(kl), 4.0L * std::cos(kl));
    return cplx(cplxl(0.0L, 4.0L) / den);
}

cplx ring_r_symmetric(double l_nm, WaveNumber k) {
    if (!(l_nm > 0.0) || !(k.k > 0.0)) {
        throw ConfigError("arm length and k must be positive");
    }
    const long double kl = static_cast<long double>(k.k) * l_nm;
    const long double s = std::sin(kl);
    const cplxl den(5.0L * s, 4.0L * std::cos(kl));
    return cplx(-3.0L * s / den);
}

ScatteringResult ring_amplitudes_asymmetric(const RingSpec& spec,
                                            WaveNumber k) {
    require_ring(spec);
    if (!(k.k > 0.0)) throw ConfigError("k must be positive");
    const long double kk = k.k;
    const long double al = spec.alpha;
    const TR tr = ring_amplitudes_raw(kk * spec.l1_nm, kk * spec.l2_nm,
                                      al * spec.l1_nm, al * spec.l2_nm);
    return make_result(cplx(tr.t), cplx(tr.r));
}

cplx ftr_beta(const RingSpec& spec, int n) {
    require_ring(spec);
    const long double x0 = ftr_x0(spec, n);
    return cplx(4.0L * spec.L() * std::cos(x0) / ftr_denom(spec, x0));
}

cplx ftr_omega(const RingSpec& spec, int n) {
    require_ring(spec);
    const long double x0 = ftr_x0(spec, n);
    const long double s = std::sin(x0);
    return cplx(2.0L * kI * s * s / ftr_denom(spec, x0));
}

cplx ftr_local_model(double dk, cplx beta, cplx omega) {
    const cplx den = dk + omega;
    if (std::abs(den) == 0.0) {
        throw SingularGamma("local model undefined at a removable crossing");
    }
    return beta * dk / den;
}

DipWidth measure_dip_fwhm(const std::function<double(double)>& transmission,
                          double k0, double step0, double grow, int cap) {
    const auto side = [&](int direction) {
        double k = k0;
        double tprev = transmission(k0);
        double kbest = k0, tbest = tprev;
        double step = step0;
        for (int i = 0; i < cap; ++i) {
            const double k2 = k + direction * step;
            const double t2 = transmission(k2);
            if (t2 > tbest) {
                kbest = k2;
                tbest = t2;
            }
            if (t2 < tprev && i > 0) return std::pair{kbest, tbest};
            k = k2;
            tprev = t2;
            step *= grow;
        }
        throw NonConvergent("no shoulder plateau found around the dip");
    };
    const auto [klo, tlo] = side(-1);
    const auto [khi, thi] = side(+1);
    const double level = std::min(tlo, thi) / 2.0;
    if (!(transmission(k0) < level)) {
        throw NonConvergent("no dip below the half-shoulder level at k0");
    }
    const auto crossing = [&](double a, double b) {
        double fa = transmission(a) - level;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (a + b);
            const double fm = transmission(m) - level;
            if ((fa < 0.0) == (fm < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
            if (std::abs(b - a) < 1e-15 * std::max(1.0, std::abs(k0))) break;
        }
        return 0.5 * (a + b);
    };
    DipWidth out;
    out.level = level;
    out.fwhm = crossing(k0, khi) - crossing(klo, k0);
    return out;
}

std::vector<ResonanceReport> find_resonances(const RingSpec& spec,
                                             double k_min, double k_max) {
    require_ring(spec);
    if (!std::isfinite(k_min) || !std::isfinite(k_max) || !(k_min < k_max) ||
        !(k_max > 0.0)) {
        throw ConfigError("resonance scan needs a finite ordered k range");
    }
    const double lo = std::max(k_min, 0.0);
    const double L = spec.L();
    std::vector<ResonanceReport> out;
    const double two_pi = 2.0 * static_cast<double>(kPi);
    for (int n = std::max(1, static_cast<int>(std::ceil(lo * L / two_pi -
                                                        1e-9)));
         ; ++n) {
        const double kr = two_pi * n / L;
        if (kr > k_max + 1e-12) break;
        if (kr < lo - 1e-12) continue;
        ResonanceReport rep;
        rep.kind = ResonanceKind::FullTransmission;
        rep.n_index = n;
        rep.k_res = kr;
        rep.beta = ftr_beta(spec, n);
        rep.omega = ftr_omega(spec, n);
        rep.width = std::abs(rep.omega);
        out.push_back(rep);
    }
    const double dl = std::abs(spec.l2_nm - spec.l1_nm);
    if (dl > 1e-12 * L) {
        const auto trans = [&](double k) {
            const TR tr = ring_amplitudes_raw(
                static_cast<long double>(k) * spec.l1_nm,
                static_cast<long double>(k) * spec.l2_nm, 0.0L, 0.0L);
            const double a = std::abs(cplx(tr.t));
            return a * a;
        };
        for (int m = 0;; ++m) {
            const double kr = (2.0 * m + 1.0) * static_cast<double>(kPi) / dl;
            if (kr > k_max + 1e-12) break;
            if (kr < lo - 1e-12) continue;
            ResonanceReport rep;
            rep.kind = ResonanceKind::SuppressedTransmission;
            rep.n_index = m;
            rep.k_res = kr;
            rep.width = measure_dip_fwhm(trans, kr).fwhm;
            out.push_back(rep);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ResonanceReport& a, const ResonanceReport& b) {
                  return a.k_res < b.k_res;
              });
    return out;
}

bool ab_ftr_condition(const RingSpec& spec, WaveNumber k) {
    const double L = spec.L();
    const double two_pi = 2.0 * static_cast<double>(kPi);
    const double kl = k.k * L;
    const double al = spec.alpha * L;
    const double n = std::round(kl / two_pi);
    const double m = std::round(al / two_pi);
    if (n < 1.0) return false;
    return std::abs(kl - n * two_pi) < 1e-10 &&
           std::abs(al - m * two_pi) < 1e-10;
}

ScatteringResult limit_probe(const RingSpec& spec, LimitOrder order,
                             double k0) {
    require_ring(spec);
    if (!(k0 > 0.0)) throw ConfigError("k0 must be positive");
    const bool flux = spec.alpha != 0.0;
    bool odd = false;
    if (flux) {
        if (order == LimitOrder::LengthFirst) {
            throw ConfigError("length-first order applies to the flux-free "
                              "ring");
        }
        if (std::abs(spec.l1_nm - spec.l2_nm) >
            1e-12 * std::max(spec.l1_nm, spec.l2_nm)) {
            throw ConfigError("flux limit probe requires equal arms");
        }
        const long double l = spec.l1_nm;
        const long long n0 = near_integer_or_throw(
            static_cast<long double>(k0) * l, kPi,
            "k0 l is not a multiple of pi (not a flux crossing)");
        const long long m0 = near_integer_or_throw(
            static_cast<long double>(spec.alpha) * l, kPi,
            "alpha l is not a multiple of pi (not a flux crossing)");
        odd = ((n0 + m0) & 1) != 0;
    } else {
        if (order == LimitOrder::AlphaFirst) {
            throw ConfigError("alpha-first order requires a flux ring");
        }
        const long long n = near_integer_or_throw(
            static_cast<long double>(k0) * spec.l1_nm, kPi,
            "k0 l1 is not a multiple of pi (crossing not removable)");
        near_integer_or_throw(static_cast<long double>(k0) * spec.L(),
                              2.0L * kPi,
                              "k0 is not a full-transmission point");
        odd = (n & 1) != 0;
    }
    const auto eval = [&](long double inner, long double outer) {
        if (!flux) {
            return order == LimitOrder::KFirst ? asym_offset(odd, inner, outer)
                                               : asym_offset(odd, outer, inner);
        }
        return order == LimitOrder::KFirst ? ab_offset(odd, inner, outer)
                                           : ab_offset(odd, outer, inner);
    };
    const long double rho = 0.1L;
    std::array<cplxl, 5> gt{}, gr{};
    for (int j = 0; j < 5; ++j) {
        const long double outer =
            1e-2L * std::pow(rho, static_cast<long double>(j));
        std::array<cplxl, 5> st{}, sr{};
        for (int m = 0; m < 5; ++m) {
            const long double inner =
                outer * outer * 1e-2L *
                std::pow(rho, static_cast<long double>(m));
            const TR v = eval(inner, outer);
            st[static_cast<std::size_t>(m)] = v.t;
            sr[static_cast<std::size_t>(m)] = v.r;
        }
        gt[static_cast<std::size_t>(j)] = richardson5(st, rho, nullptr);
        gr[static_cast<std::size_t>(j)] = richardson5(sr, rho, nullptr);
    }
    cplxl t4, r4;
    const cplxl t5 = richardson5(gt, rho, &t4);
    const cplxl r5 = richardson5(gr, rho, &r4);
    if (std::max(std::abs(t5 - t4), std::abs(r5 - r4)) > 1e-5L) {
        throw NonConvergent("iterated limit failed the Cauchy gate");
    }
    return make_result(cplx(t5), cplx(r5));
}

ScatteringResult cascade_amplitudes(const RingSpec& ring,
                                    const std::vector<double>& links_nm,
                                    WaveNumber k) {
    const ScatteringResult one = solve_graph(make_ring_graph(ring), k);
    const TransferMatrix m_ring = m_from_amplitudes(one.t, one.r, k);
    std::vector<TransferMatrix> chain;
    chain.reserve(2 * links_nm.size() + 1);
    chain.push_back(m_ring);
    for (const double d : links_nm) {
        if (d < 0.0) throw ConfigError("link lengths must be nonnegative");
        chain.push_back(m_free_segment(d, k));
        chain.push_back(m_ring);
    }
    return amplitudes_from_m(m_compose(chain));
}

}  // namespace qg
