#include "radar_slam/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "radar_slam/angles.hpp"
#include "radar_slam/errors.hpp"

namespace radar_slam {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream stream(s);
    std::string tok;
    while (stream >> tok) {
        out.push_back(tok);
    }
    return out;
}

double parse_double(const std::string& tok, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + tok + "'", line);
    }
    if (pos != tok.size()) {
        throw ParseError("trailing characters in number: '" + tok + "'", line);
    }
    return v;
}

long parse_int(const std::string& tok, int line) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError("not an integer: '" + tok + "'", line);
    }
    if (pos != tok.size()) {
        throw ParseError("trailing characters in integer: '" + tok + "'", line);
    }
    return v;
}

std::vector<double> parse_doubles(const std::vector<std::string>& toks, std::size_t expect,
                                  int line) {
    if (toks.size() != expect) {
        throw ParseError("expected " + std::to_string(expect) + " values, got " +
                             std::to_string(toks.size()),
                         line);
    }
    std::vector<double> out;
    for (const std::string& t : toks) {
        out.push_back(parse_double(t, line));
    }
    return out;
}

void require_nonnegative_diag(const std::vector<double>& diag, const char* field) {
    for (double v : diag) {
        if (v < 0.0) {
            throw ValidationError(field, "diagonal entries must be >= 0");
        }
    }
}

}  // namespace

Scenario::Scenario() {
    R = Eigen::Matrix2d::Zero();
    R(0, 0) = 0.5 * 0.5;
    R(1, 1) = std::pow(deg_to_rad(1.0), 2);
    Q = Eigen::Matrix3d::Zero();
    Q(0, 0) = 1.5e-3;
    Q(1, 1) = 1.5e-3;
    Q(2, 2) = 5e-5;
    U = Eigen::Matrix2d::Zero();
    U(0, 0) = 0.02 * 0.02;
    U(1, 1) = std::pow(deg_to_rad(0.008), 2);
}

void Scenario::validate() const {
    if (scene.steps < 1) {
        throw ValidationError("steps", "must be >= 1");
    }
    if (!(scene.dt > 0.0)) {
        throw ValidationError("dt", "must be > 0");
    }
    if (!(scene.r_max > 0.0)) {
        throw ValidationError("r_max", "must be > 0");
    }
    if (scene.clutter_rate < 0.0) {
        throw ValidationError("clutter_rate", "must be >= 0");
    }
    if (!(scene.detections_lambda > 0.0)) {
        throw ValidationError("detections_lambda", "must be > 0");
    }
    if (scene.trajectory.empty()) {
        throw ValidationError("trajectory", "at least one segment is required");
    }
    for (const TrajectorySegment& seg : scene.trajectory) {
        if (seg.steps < 1) {
            throw ValidationError("trajectory", "segment step counts must be >= 1");
        }
    }
    for (const VehicleTruth& v : scene.vehicles) {
        if (!(v.length > 0.0) || !(v.width > 0.0)) {
            throw ValidationError("vehicles", "length and width must be > 0");
        }
        if (v.birth_step < 0) {
            throw ValidationError("vehicles", "birth step must be >= 0");
        }
        if (v.depart_step >= 0 && v.depart_step <= v.birth_step) {
            throw ValidationError("vehicles", "departure must come after birth");
        }
    }
    for (const ClutterBurst& b : scene.bursts) {
        if (b.count < 0 || b.last_step < b.first_step || !(b.radius > 0.0)) {
            throw ValidationError("clutter_bursts", "malformed burst row");
        }
    }
    if (manager.r_max != scene.r_max) {
        throw ValidationError("r_max", "scene and manager sensor ranges disagree");
    }
    manager.validate();
}

Scenario parse_scenario(const std::string& text) {
    Scenario s;
    bool have_steps = false;

    enum class Section { None, Scene, Noise, Manager, Vehicles, Trajectory, Bursts, MonteCarlo };
    Section section = Section::None;

    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            continue;
        }
        const auto end = line.find_last_not_of(" \t\r");
        line = line.substr(begin, end - begin + 1);

        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError("unterminated section header", line_no);
            }
            const std::string name = line.substr(1, line.size() - 2);
            if (name == "scene") section = Section::Scene;
            else if (name == "noise") section = Section::Noise;
            else if (name == "manager") section = Section::Manager;
            else if (name == "vehicles") section = Section::Vehicles;
            else if (name == "trajectory") section = Section::Trajectory;
            else if (name == "clutter_bursts") section = Section::Bursts;
            else if (name == "montecarlo") section = Section::MonteCarlo;
            else throw ParseError("unknown section [" + name + "]", line_no);
            continue;
        }

        // Key/value sections.
        const std::size_t eq = line.find('=');
        if (section == Section::Scene || section == Section::Noise ||
            section == Section::Manager || section == Section::MonteCarlo) {
            if (eq == std::string::npos) {
                throw ParseError("expected 'key = value'", line_no);
            }
            std::string key = line.substr(0, eq);
            key = key.substr(0, key.find_last_not_of(" \t") + 1);
            const std::vector<std::string> vals = split_tokens(line.substr(eq + 1));
            if (vals.empty()) {
                throw ParseError("missing value for key '" + key + "'", line_no);
            }
            const auto one = [&]() {
                if (vals.size() != 1) {
                    throw ParseError("key '" + key + "' takes one value", line_no);
                }
                return vals[0];
            };

            if (section == Section::Scene) {
                if (key == "steps") {
                    s.scene.steps = static_cast<int>(parse_int(one(), line_no));
                    have_steps = true;
                } else if (key == "dt") {
                    s.scene.dt = parse_double(one(), line_no);
                } else if (key == "r_max") {
                    s.scene.r_max = parse_double(one(), line_no);
                    s.manager.r_max = s.scene.r_max;
                } else if (key == "clutter_rate") {
                    s.scene.clutter_rate = parse_double(one(), line_no);
                } else if (key == "detections_lambda") {
                    s.scene.detections_lambda = parse_double(one(), line_no);
                } else if (key == "initial_pose") {
                    const std::vector<double> v = parse_doubles(vals, 3, line_no);
                    s.scene.initial_pose = Pose{v[0], v[1], v[2]};
                } else {
                    throw ParseError("unknown [scene] key '" + key + "'", line_no);
                }
            } else if (section == Section::Noise) {
                if (key == "r_diag") {
                    const std::vector<double> v = parse_doubles(vals, 2, line_no);
                    require_nonnegative_diag(v, "r_diag");
                    s.R = Eigen::Matrix2d::Zero();
                    s.R(0, 0) = v[0];
                    s.R(1, 1) = v[1];
                } else if (key == "q_diag") {
                    const std::vector<double> v = parse_doubles(vals, 3, line_no);
                    require_nonnegative_diag(v, "q_diag");
                    s.Q = Eigen::Matrix3d::Zero();
                    s.Q(0, 0) = v[0];
                    s.Q(1, 1) = v[1];
                    s.Q(2, 2) = v[2];
                } else if (key == "u_diag") {
                    const std::vector<double> v = parse_doubles(vals, 2, line_no);
                    require_nonnegative_diag(v, "u_diag");
                    s.U = Eigen::Matrix2d::Zero();
                    s.U(0, 0) = v[0];
                    s.U(1, 1) = v[1];
                } else {
                    throw ParseError("unknown [noise] key '" + key + "'", line_no);
                }
            } else if (section == Section::Manager) {
                if (key == "gamma_s") s.manager.gamma_s = parse_double(one(), line_no);
                else if (key == "gamma_c") s.manager.gamma_c = parse_double(one(), line_no);
                else if (key == "gamma_a") s.manager.gamma_a = parse_double(one(), line_no);
                else if (key == "gamma_m") s.manager.gamma_m = parse_double(one(), line_no);
                else if (key == "alpha") s.manager.alpha = parse_double(one(), line_no);
                else if (key == "beta") s.manager.beta = parse_double(one(), line_no);
                else if (key == "n_c1") s.manager.n_c1 = static_cast<int>(parse_int(one(), line_no));
                else if (key == "n_c2") s.manager.n_c2 = static_cast<int>(parse_int(one(), line_no));
                else if (key == "init_logic") {
                    if (vals.size() != 2) {
                        throw ParseError("init_logic takes 'M N'", line_no);
                    }
                    s.manager.m_init = static_cast<int>(parse_int(vals[0], line_no));
                    s.manager.n_init = static_cast<int>(parse_int(vals[1], line_no));
                } else if (key == "removal_logic") {
                    if (vals.size() != 2) {
                        throw ParseError("removal_logic takes 'M N'", line_no);
                    }
                    s.manager.m_rem = static_cast<int>(parse_int(vals[0], line_no));
                    s.manager.n_rem = static_cast<int>(parse_int(vals[1], line_no));
                } else {
                    throw ParseError("unknown [manager] key '" + key + "'", line_no);
                }
            } else {  // MonteCarlo
                if (key == "seeds") {
                    s.seeds.clear();
                    for (const std::string& t : vals) {
                        const long v = parse_int(t, line_no);
                        if (v < 0) {
                            throw ParseError("seeds must be non-negative", line_no);
                        }
                        s.seeds.push_back(static_cast<std::uint64_t>(v));
                    }
                } else {
                    throw ParseError("unknown [montecarlo] key '" + key + "'", line_no);
                }
            }
            continue;
        }

        // Row-table sections.
        const std::vector<std::string> toks = split_tokens(line);
        if (section == Section::Vehicles) {
            if (toks.size() != 8) {
                throw ParseError("vehicle row needs 8 columns: "
                                 "id cx cy length width orientation birth depart",
                                 line_no);
            }
            VehicleTruth v;
            v.id = static_cast<int>(parse_int(toks[0], line_no));
            v.center = {parse_double(toks[1], line_no), parse_double(toks[2], line_no)};
            v.length = parse_double(toks[3], line_no);
            v.width = parse_double(toks[4], line_no);
            v.orientation = parse_double(toks[5], line_no);
            v.birth_step = static_cast<int>(parse_int(toks[6], line_no));
            v.depart_step = static_cast<int>(parse_int(toks[7], line_no));
            s.scene.vehicles.push_back(v);
        } else if (section == Section::Trajectory) {
            if (toks.size() != 3) {
                throw ParseError("trajectory row needs 3 columns: steps v psi", line_no);
            }
            TrajectorySegment seg;
            seg.steps = static_cast<int>(parse_int(toks[0], line_no));
            seg.u.v = parse_double(toks[1], line_no);
            seg.u.psi = parse_double(toks[2], line_no);
            s.scene.trajectory.push_back(seg);
        } else if (section == Section::Bursts) {
            if (toks.size() != 6) {
                throw ParseError("burst row needs 6 columns: "
                                 "first last cx cy radius count",
                                 line_no);
            }
            ClutterBurst b;
            b.first_step = static_cast<int>(parse_int(toks[0], line_no));
            b.last_step = static_cast<int>(parse_int(toks[1], line_no));
            b.center = {parse_double(toks[2], line_no), parse_double(toks[3], line_no)};
            b.radius = parse_double(toks[4], line_no);
            b.count = static_cast<int>(parse_int(toks[5], line_no));
            s.scene.bursts.push_back(b);
        } else {
            throw ParseError("content outside any section", line_no);
        }
    }

    if (!have_steps) {
        throw ValidationError("steps", "required field missing");
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("scenario", "cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "[scene]\n";
    out << "initial_pose = " << fmt(s.scene.initial_pose.x) << ' '
        << fmt(s.scene.initial_pose.y) << ' ' << fmt(s.scene.initial_pose.theta) << '\n';
    out << "steps = " << s.scene.steps << '\n';
    out << "dt = " << fmt(s.scene.dt) << '\n';
    out << "r_max = " << fmt(s.scene.r_max) << '\n';
    out << "clutter_rate = " << fmt(s.scene.clutter_rate) << '\n';
    out << "detections_lambda = " << fmt(s.scene.detections_lambda) << '\n';

    out << "\n[noise]\n";
    out << "r_diag = " << fmt(s.R(0, 0)) << ' ' << fmt(s.R(1, 1)) << '\n';
    out << "q_diag = " << fmt(s.Q(0, 0)) << ' ' << fmt(s.Q(1, 1)) << ' ' << fmt(s.Q(2, 2))
        << '\n';
    out << "u_diag = " << fmt(s.U(0, 0)) << ' ' << fmt(s.U(1, 1)) << '\n';

    out << "\n[manager]\n";
    out << "gamma_s = " << fmt(s.manager.gamma_s) << '\n';
    out << "gamma_c = " << fmt(s.manager.gamma_c) << '\n';
    out << "gamma_a = " << fmt(s.manager.gamma_a) << '\n';
    out << "gamma_m = " << fmt(s.manager.gamma_m) << '\n';
    out << "alpha = " << fmt(s.manager.alpha) << '\n';
    out << "beta = " << fmt(s.manager.beta) << '\n';
    out << "n_c1 = " << s.manager.n_c1 << '\n';
    out << "n_c2 = " << s.manager.n_c2 << '\n';
    out << "init_logic = " << s.manager.m_init << ' ' << s.manager.n_init << '\n';
    out << "removal_logic = " << s.manager.m_rem << ' ' << s.manager.n_rem << '\n';

    if (!s.scene.vehicles.empty()) {
        out << "\n[vehicles]\n";
        for (const VehicleTruth& v : s.scene.vehicles) {
            out << v.id << ' ' << fmt(v.center.x()) << ' ' << fmt(v.center.y()) << ' '
                << fmt(v.length) << ' ' << fmt(v.width) << ' ' << fmt(v.orientation) << ' '
                << v.birth_step << ' ' << v.depart_step << '\n';
        }
    }

    out << "\n[trajectory]\n";
    for (const TrajectorySegment& seg : s.scene.trajectory) {
        out << seg.steps << ' ' << fmt(seg.u.v) << ' ' << fmt(seg.u.psi) << '\n';
    }

    if (!s.scene.bursts.empty()) {
        out << "\n[clutter_bursts]\n";
        for (const ClutterBurst& b : s.scene.bursts) {
            out << b.first_step << ' ' << b.last_step << ' ' << fmt(b.center.x()) << ' '
                << fmt(b.center.y()) << ' ' << fmt(b.radius) << ' ' << b.count << '\n';
        }
    }

    if (!s.seeds.empty()) {
        out << "\n[montecarlo]\nseeds =";
        for (std::uint64_t seed : s.seeds) {
            out << ' ' << seed;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace radar_slam
