#include "polywell/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace polywell {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value '" + s + "' for " + key);
    }
}

}  // namespace

std::string packet_shape_name(PacketShape shape) {
    switch (shape) {
        case PacketShape::Gaussian: return "gaussian";
        case PacketShape::Square: return "square";
        case PacketShape::Lorentzian: return "lorentzian";
        case PacketShape::LinearExponential: return "linexp";
    }
    throw std::logic_error("unknown packet shape");
}

PacketShape parse_packet_shape(const std::string& name) {
    if (name == "gaussian") return PacketShape::Gaussian;
    if (name == "square") return PacketShape::Square;
    if (name == "lorentzian") return PacketShape::Lorentzian;
    if (name == "linexp") return PacketShape::LinearExponential;
    throw std::invalid_argument("unknown packet shape '" + name +
                                "' (use gaussian, square, lorentzian, linexp)");
}

std::string well_shape_name(WellShape shape) {
    switch (shape) {
        case WellShape::GaussianWell: return "gaussian";
        case WellShape::SquareWell: return "square";
        case WellShape::LorentzianWell: return "lorentzian";
    }
    throw std::logic_error("unknown well shape");
}

WellShape parse_well_shape(const std::string& name) {
    if (name == "gaussian") return WellShape::GaussianWell;
    if (name == "square") return WellShape::SquareWell;
    if (name == "lorentzian") return WellShape::LorentzianWell;
    throw std::invalid_argument("unknown well shape '" + name +
                                "' (use gaussian, square, lorentzian)");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
    out << text;
    if (!out) throw std::ios_base::failure("write failed: " + path);
}

void write_wavefunction_csv(const std::string& path, const WaveFunction& psi) {
    std::string body;
    body.reserve(80 * psi.values.size() + 16);
    body += "x,re,im,abs2\n";
    for (int i = 0; i < psi.grid.n_points; ++i) {
        const cplx v = psi.values[i];
        body += format_double(psi.grid.x(i));
        body += ',';
        body += format_double(v.real());
        body += ',';
        body += format_double(v.imag());
        body += ',';
        body += format_double(std::norm(v));
        body += '\n';
    }
    write_text_file(path, body);
}

WaveFunction read_wavefunction_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "x,re,im,abs2") {
        throw std::runtime_error("bad snapshot header in " + path +
                                 " (expected 'x,re,im,abs2')");
    }
    std::vector<double> xs;
    std::vector<cplx> vs;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty()) continue;
        double x, re, im, a2;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &x, &re, &im, &a2) != 4) {
            throw std::runtime_error("bad snapshot row in " + path + ": " + line);
        }
        xs.push_back(x);
        vs.push_back(cplx(re, im));
    }
    if (xs.size() < 3) {
        throw std::runtime_error("snapshot in " + path + " has fewer than 3 rows");
    }
    const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
    if (!(dx > 0.0)) throw std::runtime_error("snapshot x column must increase");
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double expect = xs.front() + static_cast<double>(i) * dx;
        if (std::abs(xs[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
            throw std::runtime_error("snapshot nodes are not uniformly spaced in " + path);
        }
    }
    Grid grid(xs.front(), xs.back(), static_cast<int>(xs.size()), 0.0);
    WaveFunction psi(grid);
    psi.values = std::move(vs);
    return psi;
}

void write_peaks_csv(const std::string& path, const std::vector<Peak>& peaks) {
    std::string body = "position,height\n";
    for (const Peak& p : peaks) {
        body += format_double(p.position);
        body += ',';
        body += format_double(p.height);
        body += '\n';
    }
    write_text_file(path, body);
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    out << "figure = " << c.figure << '\n';
    out << "mode = " << c.mode << '\n';
    out << "packet = " << packet_shape_name(c.packet.shape) << '\n';
    out << "q = " << format_double(c.packet.q) << '\n';
    out << "delta = " << format_double(c.packet.width) << '\n';
    out << "x0 = " << format_double(c.packet.x0) << '\n';
    out << "mass = " << format_double(c.mass) << '\n';
    out << "well = " << well_shape_name(c.well.shape) << '\n';
    out << "depth = " << format_double(c.well.depth) << '\n';
    out << "width = " << format_double(c.well.width) << '\n';
    out << "xmin = " << format_double(c.x_min) << '\n';
    out << "xmax = " << format_double(c.x_max) << '\n';
    out << "dx = " << format_double(c.dx) << '\n';
    out << "dt = " << format_double(c.dt) << '\n';
    out << "tmax = " << format_double(c.t_max) << '\n';
    out << "snapshots =";
    for (double t : c.snapshot_times) out << ' ' << format_double(t);
    out << '\n';
    out << "track-interval = " << format_double(c.track_interval) << '\n';
    out << "prominence = " << format_double(c.prominence) << '\n';
    out << "spacing-cov-max = " << format_double(c.spacing_cov_max) << '\n';
    out << "envelope-residual-max = " << format_double(c.envelope_residual_max) << '\n';
    out << "out-dir = " << c.out_dir << '\n';
    return out.str();
}

RunConfig parse_config(const std::string& text, const RunConfig& base) {
    RunConfig c = base;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "figure") {
            c.figure = static_cast<int>(parse_double(value, key));
        } else if (key == "mode") {
            c.mode = value;
        } else if (key == "packet") {
            c.packet.shape = parse_packet_shape(value);
        } else if (key == "q") {
            c.packet.q = parse_double(value, key);
        } else if (key == "delta") {
            c.packet.width = parse_double(value, key);
        } else if (key == "x0") {
            c.packet.x0 = parse_double(value, key);
        } else if (key == "mass") {
            c.mass = parse_double(value, key);
        } else if (key == "well") {
            c.well.shape = parse_well_shape(value);
        } else if (key == "depth") {
            c.well.depth = parse_double(value, key);
        } else if (key == "width") {
            c.well.width = parse_double(value, key);
        } else if (key == "xmin") {
            c.x_min = parse_double(value, key);
        } else if (key == "xmax") {
            c.x_max = parse_double(value, key);
        } else if (key == "dx") {
            c.dx = parse_double(value, key);
        } else if (key == "dt") {
            c.dt = parse_double(value, key);
        } else if (key == "tmax") {
            c.t_max = parse_double(value, key);
        } else if (key == "snapshots") {
            c.snapshot_times.clear();
            std::istringstream vs(value);
            std::string tok;
            while (vs >> tok) c.snapshot_times.push_back(parse_double(tok, key));
        } else if (key == "track-interval") {
            c.track_interval = parse_double(value, key);
        } else if (key == "prominence") {
            c.prominence = parse_double(value, key);
        } else if (key == "spacing-cov-max") {
            c.spacing_cov_max = parse_double(value, key);
        } else if (key == "envelope-residual-max") {
            c.envelope_residual_max = parse_double(value, key);
        } else if (key == "out-dir") {
            c.out_dir = value;
        } else {
            throw std::invalid_argument("config line " + std::to_string(line_no) +
                                        ": unknown key '" + key + "'");
        }
    }
    return c;
}

RunConfig load_config(const std::string& path, const RunConfig& base) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

namespace {

ordered_json speed_json(const SpeedFit& fit) {
    return ordered_json{{"speed", fit.speed},
                        {"residual", fit.residual},
                        {"residual_fraction", fit.residual_fraction},
                        {"n_used", fit.n_used}};
}

ordered_json envelope_json(const EnvelopeFit& fit) {
    return ordered_json{{"lambda", fit.lambda},
                        {"k", fit.k},
                        {"residual", fit.residual},
                        {"spacing_cov", fit.spacing_cov},
                        {"n_peaks", fit.n_peaks}};
}

}  // namespace

std::string report_to_json(const DiagnosticsReport& r, const RunConfig* config,
                           const RunSummary* run) {
    ordered_json j;
    if (config != nullptr) {
        ordered_json cfg;
        cfg["figure"] = config->figure;
        cfg["mode"] = config->mode;
        cfg["packet"] = packet_shape_name(config->packet.shape);
        cfg["q"] = config->packet.q;
        cfg["delta"] = config->packet.width;
        cfg["x0"] = config->packet.x0;
        cfg["mass"] = config->mass;
        cfg["well"] = well_shape_name(config->well.shape);
        cfg["depth"] = config->well.depth;
        cfg["width"] = config->well.width;
        cfg["xmin"] = config->x_min;
        cfg["xmax"] = config->x_max;
        cfg["dx"] = resolved_dx(*config);
        cfg["dt"] = resolved_dt(*config);
        cfg["tmax"] = config->t_max;
        j["config"] = cfg;
    }
    if (run != nullptr) {
        ordered_json rj;
        rj["steps"] = run->steps;
        rj["final_time"] = run->final_time;
        rj["final_norm"] = run->final_norm;
        rj["norm_valid"] = run->norm_valid;
        rj["first_contamination_time"] = run->first_contamination_time < 0.0
                                             ? ordered_json(nullptr)
                                             : ordered_json(run->first_contamination_time);
        rj["aborted_on_contamination"] = run->aborted_on_contamination;
        j["run"] = rj;
    }
    j["probabilities"] = ordered_json{{"reflected", r.p_refl},
                                      {"in_well", r.p_well},
                                      {"transmitted", r.p_trans},
                                      {"closure_error", r.closure_error}};
    j["formation_time"] = r.has_formation ? ordered_json(r.formation) : ordered_json(nullptr);
    j["formation_definition"] = r.formation_definition;
    j["v_refl"] = r.has_v_refl ? speed_json(r.v_refl) : ordered_json(nullptr);
    j["v_trans"] = r.has_v_trans ? speed_json(r.v_trans) : ordered_json(nullptr);
    j["interior_k"] = r.has_interior_k ? ordered_json(r.interior_k) : ordered_json(nullptr);

    ordered_json cls;
    cls["polychotomous"] = r.polychotomous;
    cls["enough_peaks"] = r.verdict.enough_peaks;
    cls["spacing_regular"] = r.verdict.spacing_regular;
    cls["envelope_clean"] = r.verdict.envelope_clean;
    cls["envelope"] =
        r.verdict.enough_peaks ? envelope_json(r.verdict.fit) : ordered_json(nullptr);
    j["classification"] = cls;

    ordered_json peaks = ordered_json::array();
    for (const Peak& p : r.reflected_peaks) {
        peaks.push_back(ordered_json{{"position", p.position}, {"height", p.height}});
    }
    j["reflected_peaks"] = peaks;

    ordered_json track = ordered_json::array();
    for (const TrackSample& s : r.track) {
        track.push_back(ordered_json{{"t", s.t},
                                     {"p_refl", s.p_refl},
                                     {"p_well", s.p_well},
                                     {"p_trans", s.p_trans},
                                     {"norm", s.norm_value},
                                     {"cm_refl", s.cm_refl},
                                     {"cm_trans", s.cm_trans},
                                     {"moment_refl", s.moment_refl},
                                     {"moment_trans", s.moment_trans}});
    }
    j["track"] = track;
    return j.dump(2) + "\n";
}

void write_report_json(const std::string& path, const DiagnosticsReport& report,
                       const RunConfig* config, const RunSummary* run) {
    write_text_file(path, report_to_json(report, config, run));
}

}  // namespace polywell
