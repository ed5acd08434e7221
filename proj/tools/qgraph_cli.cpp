// qgraph: command-line front end for two-terminal quantum-graph scattering.
// Subcommands: sweep (spectra over k / l2 / alpha / n_wells), resonances
// (classified table with widths), bound-states, cascade (ring chains).
// Output is CSV or JSON; singular grid points go to a skip log, never
// interpolated. Results are byte-identical for a fixed config regardless
// of --threads.
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qg/core.hpp"
#include "qg/models.hpp"
#include "qg/solver.hpp"
#include "qg/spectrum.hpp"

using json = nlohmann::ordered_json;
using namespace qg;

namespace {

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Most specific name for a thrown error, for skip logs and JSON payloads.
std::string error_name(const std::exception& e) {
    if (dynamic_cast<const EdgeResonanceSingularity*>(&e) != nullptr)
        return "EdgeResonanceSingularity";
    if (dynamic_cast<const SingularGamma*>(&e) != nullptr)
        return "SingularGamma";
    if (dynamic_cast<const SingularMatrix*>(&e) != nullptr)
        return "SingularMatrix";
    if (dynamic_cast<const ZeroTransmission*>(&e) != nullptr)
        return "ZeroTransmission";
    if (dynamic_cast<const MixedWaveNumber*>(&e) != nullptr)
        return "MixedWaveNumber";
    if (dynamic_cast<const NegativeEnergy*>(&e) != nullptr)
        return "NegativeEnergy";
    if (dynamic_cast<const StepTooCoarse*>(&e) != nullptr)
        return "StepTooCoarse";
    if (dynamic_cast<const DegenerateBasis*>(&e) != nullptr)
        return "DegenerateBasis";
    if (dynamic_cast<const NonConvergent*>(&e) != nullptr)
        return "NonConvergent";
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) return "ConfigError";
    if (dynamic_cast<const IoError*>(&e) != nullptr) return "IoError";
    return "Error";
}

struct Options {
    std::string subject = "ring";
    std::string swept = "k";
    double l1 = 1.0;
    double l2 = 1.0;
    double alpha = 0.0;
    double depth_ev = -0.5;
    double width_nm = 1.0;
    int n_wells = 1;
    double k_min = 0.1;
    double k_max = 10.0;
    int points = 1000;
    double start = 0.0;
    double stop = 0.0;
    double k_fixed = 0.0;
    double kappa_min = 1e-3;
    double kappa_max = 0.0;  // 0: derive from the potential depth
    std::string out;
    std::string format;  // empty: subcommand default
    std::string potential_file;
    std::string skip_log;
    std::vector<double> links;
    int threads = 1;
};

struct SweepRow {
    double param = 0.0;
    ScatteringResult sr;
};

struct SweepSkip {
    double param = 0.0;
    std::string reason;
};

struct SweepOutcome {
    std::vector<SweepRow> rows;
    std::vector<SweepSkip> skips;
    std::vector<double> grid;
};

PotentialDescriptor finite_support_potential(const Options& opt) {
    if (!opt.potential_file.empty())
        return load_tabulated_potential(opt.potential_file);
    return SquareWell{opt.depth_ev, opt.width_nm};
}

IntegrationGrid support_grid(const PotentialDescriptor& pot) {
    if (const auto* tab = std::get_if<Tabulated>(&pot)) {
        return IntegrationGrid{tab->xi_nm.front(), tab->xi_nm.back(), 2e-4};
    }
    const auto& well = std::get<SquareWell>(pot);
    return IntegrationGrid{0.0, well.width_nm, 2e-4};
}

// One scattering evaluation at a grid value of the swept parameter.
ScatteringResult evaluate_point(const Options& opt,
                                const PotentialDescriptor* pot, double x) {
    const bool sweep_k = opt.swept == "k";
    const double k = sweep_k ? x : opt.k_fixed;
    RingSpec spec{opt.l1, opt.l2, opt.alpha};
    if (opt.swept == "l2") spec.l2_nm = x;
    if (opt.swept == "alpha") spec.alpha = x;
    if (opt.subject == "ring" || opt.subject == "ab_ring") {
        return solve_graph(make_ring_graph(spec), WaveNumber{k});
    }
    if (opt.subject == "parallel_wells") {
        const int n =
            opt.swept == "n_wells" ? static_cast<int>(std::lround(x)) : opt.n_wells;
        return parallel_wells_scattering(n, opt.depth_ev, opt.width_nm,
                                         WaveNumber{k});
    }
    if (opt.subject == "cascade") {
        return cascade_amplitudes(spec, opt.links, WaveNumber{k});
    }
    // finite_support
    const auto pair =
        integrate_solutions(*pot, k_to_ev(k), support_grid(*pot));
    return amplitudes_from_solutions(pair, WaveNumber{k});
}

std::vector<double> build_grid(const Options& opt) {
    const bool sweep_k = opt.swept == "k";
    const double start = sweep_k ? opt.k_min : opt.start;
    const double stop = sweep_k ? opt.k_max : opt.stop;
    if (!(start < stop)) throw ConfigError("sweep range must have start < stop");
    std::vector<double> grid;
    if (opt.swept == "n_wells") {
        const int lo = static_cast<int>(std::ceil(start));
        const int hi = static_cast<int>(std::floor(stop));
        if (lo < 1) throw ConfigError("n_wells sweep must start at >= 1");
        for (int n = lo; n <= hi; ++n) grid.push_back(n);
        if (grid.empty()) throw ConfigError("n_wells sweep range contains no integer");
        return grid;
    }
    if (opt.points < 2) throw ConfigError("sweep needs at least two points");
    grid.reserve(opt.points);
    for (int i = 0; i < opt.points; ++i)
        grid.push_back(start + (stop - start) * i / (opt.points - 1.0));
    return grid;
}

void validate_sweep(const Options& opt) {
    const bool known_subject =
        opt.subject == "ring" || opt.subject == "ab_ring" ||
        opt.subject == "parallel_wells" || opt.subject == "cascade" ||
        opt.subject == "finite_support";
    if (!known_subject) throw ConfigError("unknown subject: " + opt.subject);
    const bool known_swept = opt.swept == "k" || opt.swept == "l2" ||
                             opt.swept == "alpha" || opt.swept == "n_wells";
    if (!known_swept) throw ConfigError("unknown swept parameter: " + opt.swept);
    if (opt.swept == "l2" && opt.subject != "ring" && opt.subject != "ab_ring")
        throw ConfigError("l2 sweeps need a ring subject");
    if (opt.swept == "alpha" && opt.subject != "ab_ring")
        throw ConfigError("alpha sweeps need the ab_ring subject");
    if (opt.swept == "n_wells" && opt.subject != "parallel_wells")
        throw ConfigError("n_wells sweeps need the parallel_wells subject");
    if (opt.swept != "k" && !(opt.k_fixed > 0.0))
        throw ConfigError("sweeps over a parameter need --k > 0");
    if (opt.subject == "ring" && opt.alpha != 0.0)
        throw ConfigError("the plain ring has no flux; use --subject ab_ring");
    if (opt.threads < 1 || opt.threads > 256)
        throw ConfigError("--threads must be in [1, 256]");
}

SweepOutcome run_sweep_grid(const Options& opt) {
    SweepOutcome out;
    out.grid = build_grid(opt);
    std::optional<PotentialDescriptor> pot;
    if (opt.subject == "finite_support") pot = finite_support_potential(opt);

    const std::size_t npts = out.grid.size();
    std::vector<std::optional<SweepRow>> rows(npts);
    std::vector<std::optional<SweepSkip>> skips(npts);
    std::atomic<std::size_t> next{0};
    const int nthreads =
        static_cast<int>(std::min<std::size_t>(opt.threads, npts));
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= npts) return;
            const double x = out.grid[i];
            try {
                rows[i] = SweepRow{x, evaluate_point(
                                          opt, pot ? &*pot : nullptr, x)};
            } catch (const std::exception& e) {
                skips[i] = SweepSkip{x, error_name(e)};
            }
        }
    };
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < npts; ++i) {
        if (rows[i]) out.rows.push_back(*rows[i]);
        if (skips[i]) out.skips.push_back(*skips[i]);
    }
    return out;
}

std::string sweep_csv(const SweepOutcome& res) {
    std::string body = "k_or_param,re_t,im_t,T,re_r,im_r,R\n";
    for (const auto& row : res.rows) {
        body += g17(row.param) + ',' + g17(row.sr.t.real()) + ',' +
                g17(row.sr.t.imag()) + ',' + g17(row.sr.T) + ',' +
                g17(row.sr.r.real()) + ',' + g17(row.sr.r.imag()) + ',' +
                g17(row.sr.R) + '\n';
    }
    return body;
}

json sweep_json(const Options& opt, const SweepOutcome& res) {
    const bool sweep_k = opt.swept == "k";
    json doc;
    doc["subject"] = opt.subject;
    doc["swept"] = opt.swept;
    doc["start"] = sweep_k ? opt.k_min : opt.start;
    doc["stop"] = sweep_k ? opt.k_max : opt.stop;
    doc["points"] = static_cast<int>(res.grid.size());
    doc["rows"] = json::array();
    for (const auto& row : res.rows) {
        json r;
        r["k_or_param"] = row.param;
        r["re_t"] = row.sr.t.real();
        r["im_t"] = row.sr.t.imag();
        r["T"] = row.sr.T;
        r["re_r"] = row.sr.r.real();
        r["im_r"] = row.sr.r.imag();
        r["R"] = row.sr.R;
        doc["rows"].push_back(std::move(r));
    }
    doc["skipped"] = json::array();
    for (const auto& s : res.skips) {
        json e;
        e["k_or_param"] = s.param;
        e["reason"] = s.reason;
        doc["skipped"].push_back(std::move(e));
    }
    return doc;
}

std::string skip_log_text(const SweepOutcome& res) {
    std::string body;
    for (const auto& s : res.skips)
        body += "k=" + g17(s.param) + " reason=" + s.reason + '\n';
    return body;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + path);
    f << body;
    if (!f) throw IoError("failed writing output file: " + path);
}

int emit_sweep(const Options& opt, const SweepOutcome& res) {
    const std::string fmt = opt.format.empty() ? "csv" : opt.format;
    const std::string payload =
        fmt == "csv" ? sweep_csv(res) : sweep_json(opt, res).dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << payload;
        for (const auto& s : res.skips)
            std::cerr << "k=" << g17(s.param) << " reason=" << s.reason << '\n';
    } else {
        write_file(opt.out, payload);
        const std::string log_path =
            opt.skip_log.empty() ? opt.out + ".skip.log" : opt.skip_log;
        write_file(log_path, skip_log_text(res));
        std::cout << "wrote " << opt.out << ": " << res.rows.size()
                  << " rows, " << res.skips.size() << " skipped\n";
    }
    if (res.rows.empty()) {
        std::cerr << "all " << res.grid.size() << " points singular\n";
        return 3;
    }
    return 0;
}

int cmd_sweep(const Options& opt) {
    validate_sweep(opt);
    return emit_sweep(opt, run_sweep_grid(opt));
}

int cmd_resonances(const Options& opt) {
    if (!(opt.k_min < opt.k_max))
        throw ConfigError("resonance range must have k-min < k-max");
    const RingSpec spec{opt.l1, opt.l2, opt.alpha};
    const auto table = find_resonances(spec, opt.k_min, opt.k_max);
    json doc;
    doc["l1"] = opt.l1;
    doc["l2"] = opt.l2;
    doc["alpha"] = opt.alpha;
    doc["k_min"] = opt.k_min;
    doc["k_max"] = opt.k_max;
    doc["resonances"] = json::array();
    for (const auto& r : table) {
        json e;
        e["kind"] = r.kind == ResonanceKind::FullTransmission
                        ? "full_transmission"
                        : "suppressed_transmission";
        e["n"] = r.n_index;
        e["k_res"] = r.k_res;
        e["width"] = r.width;
        e["re_beta"] = r.beta.real();
        e["im_beta"] = r.beta.imag();
        e["re_omega"] = r.omega.real();
        e["im_omega"] = r.omega.imag();
        doc["resonances"].push_back(std::move(e));
    }
    const std::string fmt = opt.format.empty() ? "json" : opt.format;
    if (fmt != "json") throw ConfigError("resonances supports only --format json");
    const std::string payload = doc.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << payload;
    } else {
        write_file(opt.out, payload);
        std::cout << "wrote " << opt.out << ": " << table.size()
                  << " resonances\n";
    }
    return 0;
}

int cmd_bound_states(const Options& opt) {
    json doc;
    doc["subject"] = opt.subject;
    doc["rows"] = json::array();
    auto push = [&doc](const BoundState& s) {
        json r;
        r["n_wells"] = s.n_wells;
        r["kappa"] = s.kappa;
        r["energy_ev"] = s.energy_ev;
        doc["rows"].push_back(std::move(r));
    };
    if (opt.subject == "parallel_wells") {
        if (opt.n_wells < 1) throw ConfigError("--n-wells must be >= 1");
        for (int n = 1; n <= opt.n_wells; ++n)
            push(parallel_wells_bound_state(n, opt.depth_ev, opt.width_nm));
    } else if (opt.subject == "finite_support") {
        const auto pot = finite_support_potential(opt);
        double hi = opt.kappa_max;
        if (hi <= 0.0) {
            double vmin = 0.0;
            if (const auto* tab = std::get_if<Tabulated>(&pot)) {
                for (double v : tab->v_ev) vmin = std::min(vmin, v);
            } else {
                vmin = std::min(0.0, std::get<SquareWell>(pot).depth_ev);
            }
            hi = vmin < 0.0
                     ? std::sqrt(-vmin / Units::hbar2_over_2m) * (1.0 - 1e-9)
                     : 0.0;
        }
        if (opt.kappa_min < hi) {
            for (const auto& s : find_bound_states(pot, opt.kappa_min, hi))
                push(s);
        }
    } else {
        throw ConfigError(
            "bound-states needs --subject parallel_wells or finite_support");
    }
    const std::string fmt = opt.format.empty() ? "json" : opt.format;
    if (fmt != "json")
        throw ConfigError("bound-states supports only --format json");
    const std::string payload = doc.dump(2) + "\n";
    if (opt.out.empty()) {
        std::cout << payload;
    } else {
        write_file(opt.out, payload);
        std::cout << "wrote " << opt.out << ": " << doc["rows"].size()
                  << " rows\n";
    }
    return 0;
}

void add_common_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--subject", opt.subject,
                    "ring | ab_ring | parallel_wells | cascade | finite_support");
    cmd->add_option("--l1", opt.l1, "first arm length, nm");
    cmd->add_option("--l2", opt.l2, "second arm length, nm");
    cmd->add_option("--alpha", opt.alpha, "flux phase gradient, 1/nm");
    cmd->add_option("--depth-ev", opt.depth_ev, "well depth (negative), eV");
    cmd->add_option("--width-nm", opt.width_nm, "well width, nm");
    cmd->add_option("--n-wells", opt.n_wells, "number of parallel wells");
    cmd->add_option("--k-min", opt.k_min, "sweep start for k grids, 1/nm");
    cmd->add_option("--k-max", opt.k_max, "sweep stop for k grids, 1/nm");
    cmd->add_option("--points", opt.points, "grid size (>= 2)");
    cmd->add_option("--out", opt.out, "output file (default: stdout)");
    cmd->add_option("--format", opt.format, "csv | json");
    cmd->add_option("--potential-file", opt.potential_file,
                    "two-column tabulated potential for finite_support");
    cmd->add_option("--links", opt.links, "cascade link lengths, nm (0 allowed)")
        ->delimiter(',');
    cmd->add_option("--skip-log", opt.skip_log,
                    "skip log path (default: <out>.skip.log)");
    cmd->add_option("--threads", opt.threads, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-terminal quantum-graph scattering toolkit"};
    app.require_subcommand(1);
    // key=value config file; keys live in a section named after the
    // subcommand ([sweep], [bound-states], ...). Flags win over the file.
    app.set_config("--config", "", "key=value config file; flags win");
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    Options opt;

    CLI::App* sweep = app.add_subcommand(
        "sweep", "scattering spectrum over k, l2, alpha, or n_wells");
    add_common_flags(sweep, opt);
    sweep->add_option("--swept", opt.swept, "k | l2 | alpha | n_wells");
    sweep->add_option("--start", opt.start, "sweep start (non-k parameters)");
    sweep->add_option("--stop", opt.stop, "sweep stop (non-k parameters)");
    sweep->add_option("--k", opt.k_fixed, "fixed k for non-k sweeps, 1/nm");

    CLI::App* res = app.add_subcommand(
        "resonances", "classified resonance table with widths");
    add_common_flags(res, opt);

    CLI::App* bound = app.add_subcommand(
        "bound-states", "bound-state table (kappa, energy)");
    add_common_flags(bound, opt);
    bound->add_option("--kappa-min", opt.kappa_min, "scan start, 1/nm");
    bound->add_option("--kappa-max", opt.kappa_max,
                      "scan stop, 1/nm (default: from the well depth)");

    CLI::App* casc = app.add_subcommand(
        "cascade", "k sweep of a ring chain (sweep --subject cascade)");
    add_common_flags(casc, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(opt);
        if (res->parsed()) return cmd_resonances(opt);
        if (bound->parsed()) return cmd_bound_states(opt);
        if (casc->parsed()) {
            opt.subject = "cascade";
            opt.swept = "k";
            return cmd_sweep(opt);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error [" << error_name(e) << "]: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
