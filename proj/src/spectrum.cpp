#include "qg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qg {

namespace {

constexpr cplxl kI(0.0L, 1.0L);

struct State {
    double u, up, v, vp;
};

State axpy(const State& y, double h, const State& d) {
    return {y.u + h * d.u, y.up + h * d.up, y.v + h * d.v, y.vp + h * d.vp};
}

// One classical 4th-order step of u'' = w(x) u, v'' = w(x) v with
// w(x) = (V(x) - E) / hbar2_over_2m.
State rk4_step(const PotentialDescriptor& pot, double energy_ev, double x,
               double h, const State& y) {
    const auto rhs = [&](double xx, const State& s) {
        const double w =
            (potential_value(pot, xx) - energy_ev) / Units::hbar2_over_2m;
        return State{s.up, w * s.u, s.vp, w * s.v};
    };
    const State k1 = rhs(x, y);
    const State k2 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k1));
    const State k3 = rhs(x + 0.5 * h, axpy(y, 0.5 * h, k2));
    const State k4 = rhs(x + h, axpy(y, h, k3));
    return {y.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            y.up + h / 6.0 * (k1.up + 2.0 * k2.up + 2.0 * k3.up + k4.up),
            y.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            y.vp + h / 6.0 * (k1.vp + 2.0 * k2.vp + 2.0 * k3.vp + k4.vp)};
}

// Partition boundaries where the potential is non-smooth, so no
// integration step straddles a kink.
std::vector<double> breakpoints(const PotentialDescriptor& pot, double lo,
                                double hi) {
    std::vector<double> pts{lo, hi};
    const auto add = [&](double x) {
        if (x > lo && x < hi) pts.push_back(x);
    };
    if (const auto* w = std::get_if<SquareWell>(&pot)) {
        add(0.0);
        add(w->width_nm);
    } else if (const auto* b = std::get_if<SquareBarrier>(&pot)) {
        add(0.0);
        add(b->width_nm);
    } else if (const auto* t = std::get_if<Tabulated>(&pot)) {
        for (const double x : t->xi_nm) add(x);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [&](double a, double b) {
                              return b - a < 1e-15 * std::max(1.0, std::abs(hi));
                          }),
              pts.end());
    return pts;
}

struct Integration {
    SolutionPair pair;
    double drift = 0.0;
};

Integration integrate_once(const PotentialDescriptor& pot, double energy_ev,
                           const IntegrationGrid& grid, double h,
                           const std::vector<double>& pts) {
    Integration out;
    SolutionPair& sp = out.pair;
    sp.energy_ev = energy_ev;
    sp.x_lo = grid.x_lo;
    sp.x_hi = grid.x_hi;
    State y{1.0, 0.0, 0.0, 1.0};
    sp.u1 = y.u;
    sp.up1 = y.up;
    sp.v1 = y.v;
    sp.vp1 = y.vp;
    sp.xs.push_back(grid.x_lo);
    sp.us.push_back(y.u);
    sp.vs.push_back(y.v);
    for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        const double a = pts[seg];
        const double b = pts[seg + 1];
        const int nsteps =
            std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
        const double hs = (b - a) / nsteps;
        for (int i = 0; i < nsteps; ++i) {
            const double x = a + i * hs;
            y = rk4_step(pot, energy_ev, x, hs, y);
            const double xe = (i + 1 == nsteps) ? b : x + hs;
            sp.xs.push_back(xe);
            sp.us.push_back(y.u);
            sp.vs.push_back(y.v);
            out.drift =
                std::max(out.drift, std::abs(y.u * y.vp - y.up * y.v - 1.0));
        }
    }
    sp.u2 = y.u;
    sp.up2 = y.up;
    sp.v2 = y.v;
    sp.vp2 = y.vp;
    sp.wronskian_drift = out.drift;
    return out;
}

long double pw_v0_units(double depth_ev) {
    return static_cast<long double>(depth_ev) / Units::hbar2_over_2m;
}

// Shared core of the parallel-wells amplitude, valid for complex k:
//   t = 2iW / [(1 + W^2) sin(ql) + 2iW cos(ql)],  W = n q / k.
cplxl pw_t_raw(int n, long double v0, long double l, cplxl k) {
    const cplxl q = sqrt_im_pos(k * k - v0);
    const cplxl w = static_cast<long double>(n) * q / k;
    const cplxl s = std::sin(q * l);
    const cplxl c = std::cos(q * l);
    const cplxl den = (1.0L + w * w) * s + 2.0L * kI * w * c;
    return 2.0L * kI * w / den;
}

void require_wells(int n, double width_nm) {
    if (n < 1) throw ConfigError("well count must be >= 1");
    if (!(width_nm > 0.0)) throw ConfigError("well width must be positive");
}

// Pole condition of the continued amplitude at k = i kappa, real form:
//   f(kappa) = (n^2 qt^2 - kappa^2) sin(qt l) - 2 n kappa qt cos(qt l)
// with qt = sqrt(-V0 - kappa^2).
long double pw_pole_residual(int n, long double v0, long double l,
                             long double kappa) {
    const long double qt2 = -v0 - kappa * kappa;
    const long double qt = std::sqrt(qt2);
    return (static_cast<long double>(n) * n * qt2 - kappa * kappa) *
               std::sin(qt * l) -
           2.0L * n * kappa * qt * std::cos(qt * l);
}

}  // namespace

double potential_value(const PotentialDescriptor& potential, double xi) {
    if (std::holds_alternative<Free>(potential)) return 0.0;
    if (const auto* w = std::get_if<SquareWell>(&potential)) {
        return (xi >= 0.0 && xi <= w->width_nm) ? w->depth_ev : 0.0;
    }
    if (const auto* b = std::get_if<SquareBarrier>(&potential)) {
        return (xi >= 0.0 && xi <= b->width_nm) ? b->height_ev : 0.0;
    }
    if (const auto* t = std::get_if<Tabulated>(&potential)) {
        const auto& xs = t->xi_nm;
        const auto& vs = t->v_ev;
        if (xi < xs.front() || xi > xs.back()) return 0.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), xi);
        if (it == xs.begin()) return vs.front();
        if (it == xs.end()) return vs.back();
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double f = (xi - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return vs[j - 1] + f * (vs[j] - vs[j - 1]);
    }
    throw ConfigError("no pointwise potential for an embedded scatterer");
}

SolutionPair integrate_solutions(const PotentialDescriptor& potential,
                                 double energy_ev, IntegrationGrid grid) {
    if (!(grid.x_hi > grid.x_lo)) {
        throw ConfigError("integration grid must have positive length");
    }
    if (!(grid.step > 0.0)) {
        throw ConfigError("integration step must be positive");
    }
    const std::vector<double> pts =
        breakpoints(potential, grid.x_lo, grid.x_hi);
    double h = grid.step;
    for (int attempt = 0; attempt <= 12; ++attempt) {
        Integration res = integrate_once(potential, energy_ev, grid, h, pts);
        if (res.drift < 1e-8) return std::move(res.pair);
        h /= 2.0;
    }
    throw StepTooCoarse(
        "Wronskian drift above 1e-8 after 12 step halvings");
}

ScatteringResult amplitudes_from_solutions(const SolutionPair& pair,
                                           WaveNumber k) {
    if (!(k.k > 0.0)) throw ConfigError("wave number must be positive");
    const long double u1 = pair.u1, up1 = pair.up1;
    const long double v1 = pair.v1, vp1 = pair.vp1;
    const long double u2 = pair.u2, up2 = pair.up2;
    const long double v2 = pair.v2, vp2 = pair.vp2;
    const long double wl = u2 * vp2 - up2 * v2;
    const long double scale =
        std::abs(u2 * vp2) + std::abs(up2 * v2);
    if (std::abs(wl) < 1e-12L * std::max(scale, 1e-300L)) {
        throw DegenerateBasis("solution pair is linearly dependent");
    }
    const cplxl ik = kI * static_cast<long double>(k.k);
    const cplxl m11 = ik * u1 + up1;
    const cplxl m12 = ik * v1 + vp1;
    const cplxl m21 = up2 - ik * u2;
    const cplxl m22 = vp2 - ik * v2;
    const cplxl det = m11 * m22 - m12 * m21;
    if (std::abs(det) < 1e-300L) {
        throw SingularMatrix("endpoint matching matrix is singular");
    }
    const cplxl t = 2.0L * ik * wl / det;
    const cplxl r =
        2.0L * ik * ((u1 * vp2 - v1 * up2) - ik * (u1 * v2 - u2 * v1)) / det -
        1.0L;
    return make_result(cplx(t), cplx(r));
}

double bound_state_residual(const PotentialDescriptor& potential,
                            double kappa) {
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    double lo = 0.0, hi = 1.0;
    if (const auto* w = std::get_if<SquareWell>(&potential)) {
        hi = w->width_nm;
    } else if (const auto* b = std::get_if<SquareBarrier>(&potential)) {
        hi = b->width_nm;
    } else if (const auto* t = std::get_if<Tabulated>(&potential)) {
        lo = t->xi_nm.front();
        hi = t->xi_nm.back();
    } else if (std::holds_alternative<CompositeRing>(potential)) {
        throw ConfigError("no pointwise potential for an embedded scatterer");
    }
    const double energy =
        -Units::hbar2_over_2m * kappa * kappa;
    const SolutionPair sp =
        integrate_solutions(potential, energy, {lo, hi, 2e-4});
    // Decay matching: psi = u + kappa v satisfies psi(lo) = 1,
    // psi'(lo) = kappa; a bound state needs psi'(hi) + kappa psi(hi) = 0.
    return sp.up2 + kappa * (sp.u2 + sp.vp2) + kappa * kappa * sp.v2;
}

std::vector<BoundState> find_bound_states(const PotentialDescriptor& potential,
                                          double kappa_lo, double kappa_hi,
                                          int scan_points) {
    if (std::holds_alternative<Free>(potential)) return {};
    if (std::holds_alternative<CompositeRing>(potential)) {
        throw ConfigError("no pointwise potential for an embedded scatterer");
    }
    if (!(kappa_lo > 0.0) || !(kappa_hi > kappa_lo)) {
        throw ConfigError("kappa range must be positive and ordered");
    }
    if (scan_points < 2) throw ConfigError("need at least two scan points");
    std::vector<BoundState> out;
    const auto push = [&](double kappa) {
        out.push_back(BoundState{
            kappa, -Units::hbar2_over_2m * kappa * kappa, 1});
    };
    double ka = kappa_lo;
    double ga = bound_state_residual(potential, ka);
    for (int i = 1; i < scan_points; ++i) {
        const double kb =
            kappa_lo + (kappa_hi - kappa_lo) * i / (scan_points - 1.0);
        const double gb = bound_state_residual(potential, kb);
        if (ga == 0.0) {
            push(ka);
        } else if (ga * gb < 0.0) {
            double a = ka, b = kb, fa = ga;
            while (b - a > 1e-10) {
                const double m = 0.5 * (a + b);
                const double fm = bound_state_residual(potential, m);
                if (fm == 0.0) {
                    a = b = m;
                } else if ((fa < 0.0) == (fm < 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            push(0.5 * (a + b));
        }
        ka = kb;
        ga = gb;
    }
    if (ga == 0.0) push(ka);
    return out;
}

cplx parallel_wells_amplitude(int n, double depth_ev, double width_nm,
                              WaveNumber k) {
    require_wells(n, width_nm);
    if (!(k.k > 0.0)) throw ConfigError("wave number must be positive");
    return cplx(
        pw_t_raw(n, pw_v0_units(depth_ev), width_nm, cplxl(k.k)));
}

cplx parallel_wells_amplitude_continued(int n, double depth_ev,
                                        double width_nm, cplx k) {
    require_wells(n, width_nm);
    if (std::abs(k) == 0.0) throw ConfigError("wave number must be nonzero");
    return cplx(pw_t_raw(n, pw_v0_units(depth_ev), width_nm, cplxl(k)));
}

ScatteringResult parallel_wells_scattering(int n, double depth_ev,
                                           double width_nm, WaveNumber k) {
    require_wells(n, width_nm);
    if (!(k.k > 0.0)) throw ConfigError("wave number must be positive");
    const long double v0 = pw_v0_units(depth_ev);
    const cplxl kk(static_cast<long double>(k.k));
    const cplxl q = sqrt_im_pos(kk * kk - v0);
    const cplxl w = static_cast<long double>(n) * q / kk;
    const cplxl s = std::sin(q * static_cast<long double>(width_nm));
    const cplxl c = std::cos(q * static_cast<long double>(width_nm));
    const cplxl den = (1.0L + w * w) * s + 2.0L * kI * w * c;
    return make_result(cplx(2.0L * kI * w / den),
                       cplx((1.0L - w * w) * s / den));
}

std::vector<BoundState> parallel_wells_bound_states(int n, double depth_ev,
                                                    double width_nm) {
    require_wells(n, width_nm);
    if (!(depth_ev < 0.0)) {
        throw ConfigError("bound states need a negative well depth");
    }
    const long double v0 = pw_v0_units(depth_ev);
    const long double z = std::sqrt(-v0);
    const long double l = width_nm;
    const long double lo = z * 1e-9L;
    const long double hi = z * (1.0L - 1e-9L);
    const int scan = 4000;
    std::vector<BoundState> out;
    const auto push = [&](long double kappa) {
        const double kd = static_cast<double>(kappa);
        out.push_back(
            BoundState{kd, -Units::hbar2_over_2m * kd * kd, n});
    };
    long double ka = lo;
    long double fa = pw_pole_residual(n, v0, l, ka);
    for (int i = 1; i < scan; ++i) {
        const long double kb = lo + (hi - lo) * i / (scan - 1.0L);
        const long double fb = pw_pole_residual(n, v0, l, kb);
        if (fa == 0.0L) {
            push(ka);
        } else if (fa * fb < 0.0L) {
            long double a = ka, b = kb, ga = fa;
            while (b - a > 1e-12L) {
                const long double m = 0.5L * (a + b);
                const long double gm = pw_pole_residual(n, v0, l, m);
                if (gm == 0.0L) {
                    a = b = m;
                } else if ((ga < 0.0L) == (gm < 0.0L)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            push(0.5L * (a + b));
        }
        ka = kb;
        fa = fb;
    }
    if (fa == 0.0L) push(ka);
    return out;
}

BoundState parallel_wells_bound_state(int n, double depth_ev,
                                      double width_nm) {
    const std::vector<BoundState> all =
        parallel_wells_bound_states(n, depth_ev, width_nm);
    if (all.empty()) throw NonConvergent("no bound state found");
    return all.back();
}

Tabulated load_tabulated_potential(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open potential file: " + path);
    Tabulated tab;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double x = 0.0, v = 0.0;
        if (!(ss >> x)) continue;  // blank or comment-only line
        std::string extra;
        if (!(ss >> v) || (ss >> extra)) {
            throw IoError("malformed line " + std::to_string(lineno) +
                          " in " + path);
        }
        tab.xi_nm.push_back(x);
        tab.v_ev.push_back(v);
    }
    if (tab.xi_nm.size() < 2) {
        throw IoError("potential file needs at least two samples: " + path);
    }
    const double h0 = tab.xi_nm[1] - tab.xi_nm[0];
    if (!(h0 > 0.0)) {
        throw IoError("xi grid must be strictly increasing: " + path);
    }
    for (std::size_t i = 2; i < tab.xi_nm.size(); ++i) {
        const double hi = tab.xi_nm[i] - tab.xi_nm[i - 1];
        if (std::abs(hi - h0) > 1e-9 * std::abs(h0)) {
            throw IoError("xi grid must be uniform: " + path);
        }
    }
    return tab;
}

}  // namespace qg
