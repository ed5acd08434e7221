// Shared domain types, unit conventions, error taxonomy, and 2x2
// complex-matrix primitives for the two-terminal quantum-graph library.
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace qg {

using cplx = std::complex<double>;
using cplxl = std::complex<long double>;

// hbar^2 / (2 m_e) with the free-electron mass, in eV nm^2.
// Every eV <-> nm^-1 conversion routes through this constant.
struct Units {
    static constexpr double hbar2_over_2m = 0.0380998;
};

// ---- error taxonomy ----------------------------------------------------

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NegativeEnergy : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// |t| below threshold: transfer-matrix entries would overflow (1/t).
struct ZeroTransmission : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MixedWaveNumber : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// An edge phase hits sin = 0: per-edge coefficient matrices diverge.
struct EdgeResonanceSingularity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingularGamma : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepTooCoarse : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// The (u, v) pair lost linear independence (Wronskian ~ 0).
struct DegenerateBasis : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---- wave numbers and units --------------------------------------------

// Real wave number for scattering runs, nm^-1. k > 0.
struct WaveNumber {
    double k;
};

// Analytic continuation k = i*kappa (kappa > 0) used for bound-state scans.
struct BoundStateProbe {
    double kappa;
};

// k = sqrt(E / hbar2_over_2m). Throws NegativeEnergy for E <= 0.
WaveNumber ev_to_k(double energy_ev);
// E = hbar2_over_2m * k^2.
double k_to_ev(double k);

// Complex square root on the branch with Im >= 0, so evanescent channels
// decay. Real positive arguments map to real positive roots.
cplx sqrt_im_pos(cplx z);
cplxl sqrt_im_pos(cplxl z);

// ---- 2x2 complex matrices ----------------------------------------------

struct ComplexMat2 {
    cplx m11{}, m12{}, m21{}, m22{};
};

ComplexMat2 mat2_mul(const ComplexMat2& a, const ComplexMat2& b);
cplx mat2_det(const ComplexMat2& a);
// Throws SingularMatrix when |det| < 1e-300.
ComplexMat2 mat2_inv(const ComplexMat2& a);
bool mat2_finite(const ComplexMat2& a);
ComplexMat2 mat2_identity();

// Extended-precision twin of ComplexMat2. Assembly pipelines run on it and
// narrow to double only at the public boundary.
struct LongMat2 {
    cplxl m11{}, m12{}, m21{}, m22{};
};

LongMat2 lmat2_mul(const LongMat2& a, const LongMat2& b);
cplxl lmat2_det(const LongMat2& a);
// Throws SingularMatrix when |det| < 1e-4000L.
LongMat2 lmat2_inv(const LongMat2& a);
LongMat2 lmat2_identity();
ComplexMat2 lmat2_narrow(const LongMat2& a);
LongMat2 lmat2_widen(const ComplexMat2& a);

// ---- potentials and graph edges ----------------------------------------

struct Free {};
// depth_ev < 0: V(x) = depth_ev on a width_nm stretch centered on the edge.
struct SquareWell {
    double depth_ev;
    double width_nm;
};
// height_ev > 0: same geometry with a positive step (tunneling barrier).
struct SquareBarrier {
    double height_ev;
    double width_nm;
};
// V(xi) sampled on a uniform grid, support strictly inside the edge,
// V = 0 outside the sampled window; linear interpolation between samples.
struct Tabulated {
    std::vector<double> xi_nm;
    std::vector<double> v_ev;
};
// A precomputed scatterer (e.g. a whole ring) embedded mid-edge, described
// by its transmission/reflection amplitudes referenced to its own location.
// Requires |t|^2 + |r|^2 = 1.
struct CompositeRing {
    cplx t;
    cplx r;
};

using PotentialDescriptor =
    std::variant<Free, SquareWell, SquareBarrier, Tabulated, CompositeRing>;

struct EdgeSpec {
    double length_nm;
    PotentialDescriptor potential = Free{};
    // Orientation of the flux-induced phase on this edge: -1, 0, +1.
    int ab_sign = 0;
};

// Fixed boundary data (a_in, b_in, a_out, b_out) selecting which two
// coefficients are prescribed and which are solved for.
enum class ScatteringPreset { LeftScattering, RightScattering, Jost1, Jost2 };

// Two terminal vertices joined by N >= 1 parallel edges. Covers rings
// (N = 2), flux rings (N = 2 with ab_sign = +1/-1), and well stacks.
struct TwoTerminalGraph {
    std::vector<EdgeSpec> edges;
    double flux_alpha = 0.0;  // nm^-1
    ScatteringPreset boundary = ScatteringPreset::LeftScattering;
};

// Throws ConfigError on an invalid graph: empty edge list; flux with a
// topology other than two opposite-signed arms; ab_sign set without flux;
// nonpositive lengths; potential wider than its edge; tabulated support
// touching an edge end.
void validate_graph(const TwoTerminalGraph& graph);

// ---- results -------------------------------------------------------------

struct ScatteringResult {
    cplx t;
    cplx r;
    double T;
    double R;
};

ScatteringResult make_result(cplx t, cplx r);

struct BoundState {
    double kappa;      // nm^-1, > 0
    double energy_ev;  // = -hbar2_over_2m * kappa^2
    int n_wells;       // context: number of parallel wells (1 otherwise)
};

}  // namespace qg
