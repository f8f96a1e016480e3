// Command-line front end: simulate | oracle | spectrum | diagnose | sweep.
//
// Configuration layering, lowest to highest precedence:
//   preset (--figure N)  <  config file (--config FILE)  <  explicit flags.
// The `figure` key inside a config file or report is provenance only; presets
// are applied only through the --figure flag.
//
// Exit codes: 0 success, 1 bad parameters, 2 model/computation error,
// 3 file I/O error. Tool-level errors print one JSON line on stderr.

#include "CLI11.hpp"
#include "json.hpp"

#include "polywell/core.hpp"
#include "polywell/diagnostics.hpp"
#include "polywell/io.hpp"
#include "polywell/oracle.hpp"
#include "polywell/packets.hpp"
#include "polywell/potentials.hpp"
#include "polywell/presets.hpp"
#include "polywell/propagator.hpp"
#include "polywell/spectral.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace polywell;

namespace {

std::string compact(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::ios_base::failure("cannot create directory " + dir + ": " + ec.message());
}

void print_json_error(const std::string& message) {
    nlohmann::json j{{"error", message}};
    std::cerr << j.dump() << '\n';
}

// The preset/config-file layers must exist before CLI11 binds flag targets,
// so --figure and --config are picked out of argv by hand first. Values that
// CLI11 will reject anyway (bad numbers, out-of-range figures) are left for
// it to report.
std::string scan_value(int argc, char** argv, const std::string& name) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == name && i + 1 < argc) return argv[i + 1];
        if (arg.rfind(name + "=", 0) == 0) return arg.substr(name.size() + 1);
    }
    return "";
}

RunConfig layered_base(int argc, char** argv) {
    RunConfig base;
    std::string fig = scan_value(argc, argv, "--figure");
    if (!fig.empty()) {
        char* end = nullptr;
        long n = std::strtol(fig.c_str(), &end, 10);
        if (end != nullptr && *end == '\0' && n >= 1 && n <= 8) base = preset(static_cast<int>(n));
    }
    std::string path = scan_value(argc, argv, "--config");
    if (!path.empty()) base = load_config(path, base);
    return base;
}

// String shuttles for enum-valued flags.
struct ShapeNames {
    std::string packet;
    std::string well;
};

void add_run_options(CLI::App* sub, RunConfig& cfg, ShapeNames& names, std::string& config_path,
                     bool& dry_run) {
    sub->add_option("--figure", cfg.figure, "preset 1..8 as the base configuration")
        ->check(CLI::Range(1, 8));
    sub->add_option("--config", config_path, "key = value file layered over the preset");
    sub->add_option("--packet", names.packet, "gaussian | square | lorentzian | linexp");
    sub->add_option("--delta", cfg.packet.width, "packet width parameter");
    sub->add_option("--x0", cfg.packet.x0, "packet center");
    sub->add_option("--mass", cfg.mass, "particle mass");
    sub->add_option("--well", names.well, "gaussian | square | lorentzian");
    sub->add_option("--depth", cfg.well.depth, "well depth (attractive)");
    sub->add_option("--width", cfg.well.width, "well width scale");
    sub->add_option("--xmin", cfg.x_min, "left grid edge");
    sub->add_option("--xmax", cfg.x_max, "right grid edge");
    sub->add_option("--dx", cfg.dx, "grid spacing; 0 = min(delta, width)/25");
    sub->add_option("--dt", cfg.dt, "time step; 0 = 2 m dx^2");
    sub->add_option("--tmax", cfg.t_max, "evolution time");
    sub->add_option("--snapshots", cfg.snapshot_times, "comma-separated snapshot times")
        ->delimiter(',');
    sub->add_option("--track-interval", cfg.track_interval,
                    "observable sampling interval; 0 = tmax/100");
    sub->add_option("--prominence", cfg.prominence, "peak detection threshold (0..1)");
    sub->add_option("--spacing-cov-max", cfg.spacing_cov_max,
                    "max spacing variation for a regular train");
    sub->add_option("--envelope-residual-max", cfg.envelope_residual_max,
                    "max exponential-envelope misfit");
    sub->add_option("--out-dir", cfg.out_dir, "output directory");
    sub->add_flag("--dry-run", dry_run, "validate, echo the resolved config, and exit");
}

int thread_cap(std::size_t n_jobs) {
    long cap = 0;
    if (const char* env = std::getenv("POLYWELL_THREADS")) {
        char* end = nullptr;
        cap = std::strtol(env, &end, 10);
        if (end == nullptr || *end != '\0' || cap < 1) {
            throw std::invalid_argument("POLYWELL_THREADS must be a positive integer");
        }
    } else {
        cap = static_cast<long>(std::thread::hardware_concurrency());
        if (cap < 1) cap = 1;
    }
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cap), n_jobs));
}

struct SimulateOutcome {
    DiagnosticsReport report;
    RunSummary summary;
};

SimulateOutcome run_simulate(const RunConfig& cfg) {
    validate(cfg);
    Grid grid = make_grid(cfg);
    std::vector<double> potential = evaluate(cfg.well, grid);
    WaveFunction initial = make_packet(grid, cfg.packet);
    PhysicalParams params(cfg.mass);
    RegionSplit split = make_split(cfg);
    TrackRecorder recorder(split);

    RunOptions opts;
    opts.snapshot_times = cfg.snapshot_times;
    double track_dt = cfg.track_interval > 0.0 ? cfg.track_interval : cfg.t_max / 100.0;
    long long every = std::llround(track_dt / grid.dt);
    opts.observer_interval = static_cast<int>(std::clamp<long long>(every, 1, 1 << 30));
    opts.observer = [&recorder](const WaveFunction& psi) { recorder(psi); };

    RunResult result = run(initial, potential, params, cfg.t_max, opts);

    ensure_dir(cfg.out_dir);
    for (const WaveFunction& snap : result.snapshots) {
        write_wavefunction_csv(join_path(cfg.out_dir, "snapshot_t" + compact(snap.time) + ".csv"),
                               snap);
    }
    write_wavefunction_csv(join_path(cfg.out_dir, "final.csv"), result.final_state);

    RegionSplit interior = make_interior_split(cfg);
    SimulateOutcome out{build_report(result.final_state, recorder.samples(), split,
                                     make_classify_options(cfg), &interior),
                        RunSummary{result.steps, result.final_state.time,
                                   norm(result.final_state), result.norm_valid,
                                   result.first_contamination_time,
                                   result.aborted_on_contamination}};
    write_report_json(join_path(cfg.out_dir, "report.json"), out.report, &cfg, &out.summary);
    write_peaks_csv(join_path(cfg.out_dir, "peaks.csv"), out.report.reflected_peaks);
    return out;
}

void print_run_warnings(const RunSummary& s) {
    if (s.aborted_on_contamination) {
        std::cerr << "warning: boundary contamination at t=" << compact(s.first_contamination_time)
                  << ", run stopped early at t=" << compact(s.final_time) << '\n';
    } else if (s.first_contamination_time >= 0.0) {
        std::cerr << "warning: boundary contamination from t="
                  << compact(s.first_contamination_time) << '\n';
    }
    if (!s.norm_valid) std::cerr << "warning: norm drifted beyond tolerance; run flagged invalid\n";
}

std::string outcome_line(const std::string& mode, const RunConfig& cfg,
                         const SimulateOutcome& out) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: q=%g t=%g P(reflected)=%.6f P(well)=%.6f P(transmitted)=%.6f "
                  "wave_train=%s peaks=%zu",
                  mode.c_str(), cfg.packet.q, out.summary.final_time, out.report.p_refl,
                  out.report.p_well, out.report.p_trans,
                  out.report.polychotomous ? "yes" : "no", out.report.reflected_peaks.size());
    return std::string(buf) + " -> " + join_path(cfg.out_dir, "report.json");
}

int cmd_simulate(RunConfig cfg, bool dry_run) {
    cfg.mode = "simulate";
    validate(cfg);
    if (dry_run) {
        std::cout << serialize_config(cfg);
        return 0;
    }
    SimulateOutcome out = run_simulate(cfg);
    print_run_warnings(out.summary);
    std::cout << outcome_line("simulate", cfg, out) << '\n';
    return 0;
}

int cmd_oracle(RunConfig cfg, bool dry_run) {
    cfg.mode = "oracle";
    cfg.snapshot_times = {cfg.t_max};   // analytic evaluation happens at t_max only
    validate(cfg);
    if (dry_run) {
        std::cout << serialize_config(cfg);
        return 0;
    }
    SquareWellProblem problem;
    problem.mass = cfg.mass;
    problem.depth = cfg.well.depth;
    problem.half_width = cfg.well.width;
    problem.q = cfg.packet.q;
    problem.x0 = cfg.packet.x0;
    problem.d = cfg.packet.width;
    AnalyticEvolver evolver(problem);

    Grid grid = make_grid(cfg);
    WaveFunction psi(grid);
    psi.values = evolver.evaluate_uniform(grid.x_min, grid.dx, grid.n_points, cfg.t_max);
    psi.time = cfg.t_max;

    ensure_dir(cfg.out_dir);
    write_wavefunction_csv(join_path(cfg.out_dir, "oracle_t" + compact(cfg.t_max) + ".csv"), psi);
    RegionSplit interior = make_interior_split(cfg);
    SimulateOutcome out{
        build_report(psi, {}, make_split(cfg), make_classify_options(cfg), &interior),
        RunSummary{}};
    out.summary.final_time = cfg.t_max;
    out.summary.final_norm = norm(psi);
    write_report_json(join_path(cfg.out_dir, "report.json"), out.report, &cfg, nullptr);
    write_peaks_csv(join_path(cfg.out_dir, "peaks.csv"), out.report.reflected_peaks);
    std::cout << outcome_line("oracle", cfg, out) << '\n';
    return 0;
}

int cmd_spectrum(double mass, double depth, double half_width, const std::string& out_dir,
                 bool write_csv) {
    BoundStateSet set = bound_states(mass, depth, half_width);
    std::printf("bound states: mass=%g depth=%g half-width=%g count=%zu\n", mass, depth,
                half_width, set.states.size());
    std::printf("  n  parity        energy                 k                k'\n");
    for (const BoundState& s : set.states) {
        std::printf(" %2d  %-6s  %18.12g  %16.12g  %16.12g\n", s.n,
                    s.parity == Parity::Even ? "even" : "odd", s.energy, s.k, s.k_prime);
    }
    ResonanceDetuning rd = resonance_detuning(mass, depth, half_width);
    std::printf("nearest zero-energy threshold: k'w=%.12g (%s), detuning %+.12g\n",
                rd.nearest_threshold, rd.parity == Parity::Even ? "even" : "odd", rd.detuning);
    std::printf("predicted reflected-train wavenumber pi/(4w) = %.12g\n",
                predicted_reflected_k(half_width));
    if (write_csv) {
        ensure_dir(out_dir);
        std::ostringstream csv;
        csv << "n,parity,energy,k,k_prime\n";
        for (const BoundState& s : set.states) {
            csv << s.n << ',' << (s.parity == Parity::Even ? "even" : "odd") << ','
                << format_double(s.energy) << ',' << format_double(s.k) << ','
                << format_double(s.k_prime) << '\n';
        }
        write_text_file(join_path(out_dir, "spectrum.csv"), csv.str());
    }
    return 0;
}

int cmd_diagnose(const std::string& input, double width, const ClassifyOptions& options,
                 const std::string& out_dir) {
    WaveFunction psi = read_wavefunction_csv(input);
    RegionSplit split{-width, width};
    DiagnosticsReport report = build_report(psi, {}, split, options);
    ensure_dir(out_dir);
    write_report_json(join_path(out_dir, "report.json"), report, nullptr);
    write_peaks_csv(join_path(out_dir, "peaks.csv"), report.reflected_peaks);
    std::printf("diagnose: P(reflected)=%.6f P(well)=%.6f P(transmitted)=%.6f wave_train=%s "
                "peaks=%zu -> %s\n",
                report.p_refl, report.p_well, report.p_trans,
                report.polychotomous ? "yes" : "no", report.reflected_peaks.size(),
                join_path(out_dir, "report.json").c_str());
    return 0;
}

int cmd_sweep(const RunConfig& base, const std::vector<double>& qs, bool dry_run) {
    std::vector<RunConfig> runs;
    for (double q : qs) {
        RunConfig cfg = base;
        cfg.mode = "simulate";
        cfg.packet.q = q;
        cfg.out_dir = join_path(base.out_dir, "q_" + compact(q));
        validate(cfg);
        runs.push_back(std::move(cfg));
    }
    if (dry_run) {
        for (const RunConfig& cfg : runs) std::cout << serialize_config(cfg) << '\n';
        return 0;
    }

    std::vector<std::optional<SimulateOutcome>> outcomes(runs.size());
    std::vector<std::string> errors(runs.size());
    std::vector<int> codes(runs.size(), 0);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = cursor.fetch_add(1);
            if (i >= runs.size()) return;
            try {
                outcomes[i] = run_simulate(runs[i]);
            } catch (const std::invalid_argument& e) {
                errors[i] = e.what();
                codes[i] = 1;
            } catch (const std::system_error& e) {
                errors[i] = e.what();
                codes[i] = 3;
            } catch (const std::exception& e) {
                errors[i] = e.what();
                codes[i] = 2;
            }
        }
    };
    int n_threads = thread_cap(runs.size());
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();

    nlohmann::ordered_json merged = nlohmann::ordered_json::array();
    int exit_code = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        nlohmann::ordered_json entry;
        entry["q"] = runs[i].packet.q;
        entry["dir"] = runs[i].out_dir;
        if (outcomes[i].has_value()) {
            const SimulateOutcome& out = *outcomes[i];
            entry["p_refl"] = out.report.p_refl;
            entry["p_well"] = out.report.p_well;
            entry["p_trans"] = out.report.p_trans;
            entry["polychotomous"] = out.report.polychotomous;
            entry["formation_time"] = out.report.has_formation
                                          ? nlohmann::ordered_json(out.report.formation)
                                          : nlohmann::ordered_json(nullptr);
            entry["v_refl"] = out.report.has_v_refl
                                  ? nlohmann::ordered_json(out.report.v_refl.speed)
                                  : nlohmann::ordered_json(nullptr);
            entry["norm_valid"] = out.summary.norm_valid;
            print_run_warnings(out.summary);
            std::cout << outcome_line("sweep", runs[i], out) << '\n';
        } else {
            entry["error"] = errors[i];
            exit_code = std::max(exit_code, codes[i]);
        }
        merged.push_back(entry);
    }
    ensure_dir(base.out_dir);
    write_text_file(join_path(base.out_dir, "sweep_report.json"), merged.dump(2) + "\n");
    if (exit_code != 0) {
        std::string failed;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (!errors[i].empty()) {
                if (!failed.empty()) failed += "; ";
                failed += "q=" + compact(runs[i].packet.q) + ": " + errors[i];
            }
        }
        print_json_error("sweep: " + failed);
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        RunConfig cfg = layered_base(argc, argv);
        ShapeNames names{packet_shape_name(cfg.packet.shape), well_shape_name(cfg.well.shape)};
        std::string config_path;
        bool dry_run = false;

        CLI::App app{"polychotomous reflection from an attractive well: grid propagation, "
                     "analytic square-well evolution, spectra, and wave-train diagnostics"};
        app.require_subcommand(1);

        CLI::App* sim = app.add_subcommand("simulate", "propagate a packet and diagnose the result");
        add_run_options(sim, cfg, names, config_path, dry_run);
        sim->add_option("--q", cfg.packet.q, "packet carrier momentum");

        CLI::App* orc = app.add_subcommand(
            "oracle", "evaluate the analytic square-well evolution on the same window");
        add_run_options(orc, cfg, names, config_path, dry_run);
        orc->add_option("--q", cfg.packet.q, "packet carrier momentum");

        double sp_mass = 20.0, sp_depth = 1.0, sp_half_width = 1.0;
        std::string sp_out_dir = ".";
        CLI::App* spectrum =
            app.add_subcommand("spectrum", "square-well bound states and resonance detuning");
        spectrum->add_option("--mass", sp_mass, "particle mass");
        spectrum->add_option("--depth", sp_depth, "well depth");
        spectrum->add_option("--half-width", sp_half_width, "well half-width");
        CLI::Option* sp_out = spectrum->add_option("--out-dir", sp_out_dir,
                                                   "also write spectrum.csv here");

        std::string diag_input, diag_out_dir = ".";
        double diag_width = 1.0;
        ClassifyOptions diag_options;
        CLI::App* diagnose =
            app.add_subcommand("diagnose", "recompute diagnostics from a wave-function CSV");
        diagnose->add_option("--input", diag_input, "CSV with header x,re,im,abs2")->required();
        diagnose->add_option("--width", diag_width, "well width scale (region split at +-width)");
        diagnose->add_option("--prominence", diag_options.prominence, "peak detection threshold");
        diagnose->add_option("--spacing-cov-max", diag_options.spacing_cov_max,
                             "max spacing variation for a regular train");
        diagnose->add_option("--envelope-residual-max", diag_options.envelope_residual_max,
                             "max exponential-envelope misfit");
        diagnose->add_option("--out-dir", diag_out_dir, "output directory");

        std::vector<double> sweep_qs;
        CLI::App* sweep = app.add_subcommand("sweep", "run simulate across several momenta");
        add_run_options(sweep, cfg, names, config_path, dry_run);
        sweep->add_option("--q", sweep_qs, "comma-separated carrier momenta")
            ->delimiter(',')
            ->required();

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? 0 : 1;
        }

        cfg.packet.shape = parse_packet_shape(names.packet);
        cfg.well.shape = parse_well_shape(names.well);

        if (sim->parsed()) return cmd_simulate(cfg, dry_run);
        if (orc->parsed()) return cmd_oracle(cfg, dry_run);
        if (spectrum->parsed()) {
            return cmd_spectrum(sp_mass, sp_depth, sp_half_width, sp_out_dir, sp_out->count() > 0);
        }
        if (diagnose->parsed()) {
            return cmd_diagnose(diag_input, diag_width, diag_options, diag_out_dir);
        }
        if (sweep->parsed()) return cmd_sweep(cfg, sweep_qs, dry_run);
        return 1;
    } catch (const std::invalid_argument& e) {
        print_json_error(e.what());
        return 1;
    } catch (const std::system_error& e) {
        print_json_error(e.what());
        return 3;
    } catch (const std::exception& e) {
        print_json_error(e.what());
        return 2;
    }
}
