#pragma once
/**
 * config.hpp
 * ----------
 * Flat INI-style experiment configuration and fixed-precision CSV
 * emission. Grammar (all lengths nm, wave numbers nm^-1, natural units
 * hbar = m = 1 unless overridden):
 *
 *     [packet]
 *     a = 0.1
 *     x0 = 0 0
 *     k0 = 50 0
 *     mass = 1
 *     hbar = 1
 *
 *     [experiment]
 *     separation = 10
 *     aperture = 0.1          ; defaults to the packet width when omitted
 *     screen_distance = 20
 *     screen_min = -15
 *     screen_max = 15
 *     samples = 3001
 *     corrected_branch = 2
 *
 *     [defects]
 *     epsilon = 0.1
 *     0 0                     ; one bare "x1 x2" line per defect
 *
 * Comments start with '#' or ';'. Unknown sections or keys are rejected.
 * Serialization uses 17 significant digits so parse -> write -> parse is
 * the identity and CSV output is bit-stable across runs.
 */

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "torsionwave/common.hpp"
#include "torsionwave/defect_geometry.hpp"
#include "torsionwave/interference.hpp"
#include "torsionwave/wavefunction.hpp"

namespace torsionwave {

/** One experiment: packet, slit geometry, and the defect set. */
struct ExperimentConfig {
    PacketParams packet{};
    SlitExperiment experiment{};
    DefectSet defects{{{0.0, 0.0}}, 0.1};

    void validate() const {
        PacketParams check(packet.a, packet.x0, packet.k0, packet.mass, packet.hbar);
        (void)check;
        experiment.validate();
        DefectSet dcheck(defects.positions, defects.epsilon);
        (void)dcheck;
    }
};

/** Shortest 17-significant-digit decimal form (round-trips a double). */
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ValidationError("config: bad number '" + s + "' in " + where);
    }
    if (pos != s.size()) throw ValidationError("config: trailing junk in '" + s + "' (" + where + ")");
    return v;
}

inline Vec2 parse_vec2(const std::string& s, const std::string& where) {
    std::istringstream in(s);
    std::string a, b, rest;
    if (!(in >> a >> b) || (in >> rest))
        throw ValidationError("config: expected two numbers in " + where);
    return {parse_double(a, where), parse_double(b, where)};
}

}  // namespace detail

/** Parses INI text into a config; strict about sections and keys. */
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.defects.positions.clear();  // positions come from the file (or default later)
    bool packet_aperture_given = false;
    bool any_defect_section = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const std::size_t cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line.erase(cpos);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ValidationError("config: malformed section at " + where);
            section = line.substr(1, line.size() - 2);
            if (section != "packet" && section != "experiment" && section != "defects")
                throw ValidationError("config: unknown section [" + section + "] at " + where);
            if (section == "defects") any_defect_section = true;
            continue;
        }
        if (section.empty())
            throw ValidationError("config: content before any section at " + where);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            // Bare lines are only meaningful as defect coordinates.
            if (section != "defects")
                throw ValidationError("config: expected key=value at " + where);
            cfg.defects.positions.push_back(detail::parse_vec2(line, where));
            continue;
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (section == "packet") {
            if (key == "a")
                cfg.packet.a = detail::parse_double(val, where);
            else if (key == "x0")
                cfg.packet.x0 = detail::parse_vec2(val, where);
            else if (key == "k0")
                cfg.packet.k0 = detail::parse_vec2(val, where);
            else if (key == "mass")
                cfg.packet.mass = detail::parse_double(val, where);
            else if (key == "hbar")
                cfg.packet.hbar = detail::parse_double(val, where);
            else
                throw ValidationError("config: unknown key '" + key + "' in [packet] at " + where);
        } else if (section == "experiment") {
            if (key == "separation")
                cfg.experiment.separation = detail::parse_double(val, where);
            else if (key == "aperture") {
                cfg.experiment.aperture = detail::parse_double(val, where);
                packet_aperture_given = true;
            } else if (key == "screen_distance")
                cfg.experiment.screen_distance = detail::parse_double(val, where);
            else if (key == "screen_min")
                cfg.experiment.screen_min = detail::parse_double(val, where);
            else if (key == "screen_max")
                cfg.experiment.screen_max = detail::parse_double(val, where);
            else if (key == "samples")
                cfg.experiment.samples = static_cast<int>(detail::parse_double(val, where));
            else if (key == "corrected_branch")
                cfg.experiment.corrected_branch = static_cast<int>(detail::parse_double(val, where));
            else
                throw ValidationError("config: unknown key '" + key + "' in [experiment] at " +
                                      where);
        } else {  // defects
            if (key == "epsilon")
                cfg.defects.epsilon = detail::parse_double(val, where);
            else
                throw ValidationError("config: unknown key '" + key + "' in [defects] at " + where);
        }
    }
    if (!any_defect_section || cfg.defects.positions.empty())
        cfg.defects.positions = {{0.0, 0.0}};
    if (!packet_aperture_given) cfg.experiment.aperture = cfg.packet.a;
    cfg.validate();
    return cfg;
}

/** Loads and parses a config file. */
inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

/** Serializes a config; parse(write(cfg)) == cfg field-for-field. */
inline std::string write_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "[packet]\n";
    out << "a = " << fmt17(cfg.packet.a) << "\n";
    out << "x0 = " << fmt17(cfg.packet.x0.x1) << " " << fmt17(cfg.packet.x0.x2) << "\n";
    out << "k0 = " << fmt17(cfg.packet.k0.x1) << " " << fmt17(cfg.packet.k0.x2) << "\n";
    out << "mass = " << fmt17(cfg.packet.mass) << "\n";
    out << "hbar = " << fmt17(cfg.packet.hbar) << "\n";
    out << "\n[experiment]\n";
    out << "separation = " << fmt17(cfg.experiment.separation) << "\n";
    out << "aperture = " << fmt17(cfg.experiment.aperture) << "\n";
    out << "screen_distance = " << fmt17(cfg.experiment.screen_distance) << "\n";
    out << "screen_min = " << fmt17(cfg.experiment.screen_min) << "\n";
    out << "screen_max = " << fmt17(cfg.experiment.screen_max) << "\n";
    out << "samples = " << cfg.experiment.samples << "\n";
    out << "corrected_branch = " << cfg.experiment.corrected_branch << "\n";
    out << "\n[defects]\n";
    out << "epsilon = " << fmt17(cfg.defects.epsilon) << "\n";
    for (const auto& d : cfg.defects.positions)
        out << fmt17(d.x1) << " " << fmt17(d.x2) << "\n";
    return out.str();
}

/** Writes a screen profile as `x2_nm,intensity,epsilon` rows. */
inline void write_profile_csv(std::ostream& out, const IntensityProfile& profile) {
    out << "x2_nm,intensity,epsilon\n";
    for (std::size_t i = 0; i < profile.positions.size(); ++i)
        out << fmt17(profile.positions[i]) << "," << fmt17(profile.values[i]) << ","
            << fmt17(profile.epsilon) << "\n";
}

/** Writes a probability time series as `t,norm,atom_weight,total` rows. */
inline void write_probability_csv(std::ostream& out, const std::vector<double>& t,
                                  const std::vector<double>& norms,
                                  const std::vector<double>& weights) {
    out << "t,norm,atom_weight,total\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        out << fmt17(t[i]) << "," << fmt17(norms[i]) << "," << fmt17(weights[i]) << ","
            << fmt17(norms[i] + weights[i]) << "\n";
}

}  // namespace torsionwave
