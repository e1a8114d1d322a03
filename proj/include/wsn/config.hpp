#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wsn/sim.hpp"

// Scenario files: a small sectioned key = value format. Sections are
// [scenario], [radio], [leach], [fca] and [fuzzy]; every key is optional
// and falls back to the built-in default, unknown keys and sections are
// rejected. Errors carry file, line and key so a typo is a one-line fix.
//
// The [fuzzy] section can override any membership function (3 numbers for a
// triangle, 4 for a trapezoid) and point `rules_file` at a rule table, one
// `<distance> <energy> <radius>` triple per line.

namespace wsn {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : ConfigError {
    explicit ParseError(const std::string& what) : ConfigError(what) {}
};

struct ValidationError : ConfigError {
    explicit ValidationError(const std::string& what) : ConfigError(what) {}
};

namespace detail {

inline std::string loc(const std::filesystem::path& path, int line) {
    return path.string() + ":" + std::to_string(line);
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct IniEntry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::vector<IniEntry> parse_ini(const std::string& text,
                                       const std::filesystem::path& path) {
    std::vector<IniEntry> entries;
    std::string section;
    int line_no = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#' || line.front() == ';')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ParseError(loc(path, line_no) + ": malformed section header '" +
                                 std::string(line) + "'");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(loc(path, line_no) + ": expected 'key = value', got '" +
                             std::string(line) + "'");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty())
            throw ParseError(loc(path, line_no) + ": empty key");
        if (section.empty())
            throw ParseError(loc(path, line_no) + ": key '" + key +
                             "' appears before any [section]");
        for (const IniEntry& e : entries)
            if (e.section == section && e.key == key)
                throw ParseError(loc(path, line_no) + ": duplicate key '" + key + "' in [" +
                                 section + "] (first at line " + std::to_string(e.line) + ")");
        entries.push_back({section, key, value, line_no, false});
    }
    return entries;
}

inline double parse_double(const IniEntry& e, const std::filesystem::path& path) {
    const std::string_view s = e.value;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(loc(path, e.line) + ": key '" + e.key + "': '" + e.value +
                         "' is not a finite number");
    return v;
}

inline std::int64_t parse_int(const IniEntry& e, const std::filesystem::path& path) {
    const std::string_view s = e.value;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(loc(path, e.line) + ": key '" + e.key + "': '" + e.value +
                         "' is not an integer");
    return v;
}

inline std::uint64_t parse_uint(const IniEntry& e, const std::filesystem::path& path) {
    const std::string_view s = e.value;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(loc(path, e.line) + ": key '" + e.key + "': '" + e.value +
                         "' is not a non-negative integer");
    return v;
}

inline MembershipFunction parse_mf(const IniEntry& e, const std::filesystem::path& path) {
    std::vector<double> pts;
    std::istringstream in(e.value);
    std::string tok;
    while (in >> tok) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size())
            throw ParseError(loc(path, e.line) + ": key '" + e.key + "': '" + tok +
                             "' is not a number");
        pts.push_back(v);
    }
    try {
        if (pts.size() == 3)
            return MembershipFunction::triangular(pts[0], pts[1], pts[2]);
        if (pts.size() == 4)
            return MembershipFunction::trapezoidal(pts[0], pts[1], pts[2], pts[3]);
    } catch (const std::invalid_argument& ex) {
        throw ValidationError(loc(path, e.line) + ": key '" + e.key + "': " + ex.what());
    }
    throw ParseError(loc(path, e.line) + ": key '" + e.key +
                     "': expected 3 (triangle) or 4 (trapezoid) breakpoints, got " +
                     std::to_string(pts.size()));
}

inline std::vector<FuzzyRule> parse_rules_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open rules file '" + path.string() + "'");
    std::vector<FuzzyRule> rules;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::vector<std::string> tok;
        std::istringstream ls{std::string(trim(raw))};
        std::string t;
        while (ls >> t) {
            if (t.front() == '#')
                break;
            tok.push_back(t);
        }
        if (tok.empty())
            continue;
        if (tok.size() != 3)
            throw ParseError(loc(path, line_no) +
                             ": expected '<distance> <energy> <radius>', got " +
                             std::to_string(tok.size()) + " tokens");
        rules.push_back({tok[0], tok[1], tok[2]});
    }
    return rules;
}

template <typename T, typename Pred>
T checked(T v, Pred ok, const IniEntry& e, const std::filesystem::path& path,
          const char* requirement) {
    if (!ok(v))
        throw ValidationError(loc(path, e.line) + ": key '" + e.key + "': " + requirement);
    return v;
}

inline std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_mf(const MembershipFunction& mf) {
    std::string out;
    for (double b : mf.breakpoints()) {
        if (!out.empty())
            out += ' ';
        out += fmt_full(b);
    }
    return out;
}

} // namespace detail

inline ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    std::vector<detail::IniEntry> entries = detail::parse_ini(buf.str(), path);

    ScenarioConfig cfg;
    auto positive = [](auto v) { return v > 0; };

    for (detail::IniEntry& e : entries) {
        using namespace detail;
        e.used = true;
        if (e.section == "scenario") {
            if (e.key == "area_width")
                cfg.area_width = checked(parse_double(e, path), positive, e, path,
                                         "must be positive");
            else if (e.key == "area_height")
                cfg.area_height = checked(parse_double(e, path), positive, e, path,
                                          "must be positive");
            else if (e.key == "bs_x")
                cfg.bs.x = parse_double(e, path);
            else if (e.key == "bs_y")
                cfg.bs.y = parse_double(e, path);
            else if (e.key == "node_count")
                cfg.node_count = static_cast<int>(
                    checked(parse_int(e, path), [](std::int64_t v) { return v >= 2 && v <= 1000000; },
                            e, path, "must be between 2 and 1000000"));
            else if (e.key == "initial_energy")
                cfg.initial_energy = checked(parse_double(e, path), positive, e, path,
                                             "must be positive");
            else if (e.key == "packet_bits")
                cfg.packet_bits = checked(parse_int(e, path), positive, e, path,
                                          "must be positive");
            else if (e.key == "aggregation_ratio")
                cfg.aggregation_ratio =
                    checked(parse_double(e, path), [](double v) { return v > 0.0 && v <= 1.0; },
                            e, path, "must be in (0, 1]");
            else if (e.key == "max_rounds")
                cfg.max_rounds = checked(parse_int(e, path), positive, e, path,
                                         "must be positive");
            else if (e.key == "trials")
                cfg.trials = static_cast<int>(
                    checked(parse_int(e, path), [](std::int64_t v) { return v >= 1 && v <= 1000000; },
                            e, path, "must be between 1 and 1000000"));
            else if (e.key == "base_seed")
                cfg.base_seed = parse_uint(e, path);
            else
                e.used = false;
        } else if (e.section == "radio") {
            if (e.key == "e_elec")
                cfg.radio.e_elec = checked(parse_double(e, path), positive, e, path,
                                           "must be positive");
            else if (e.key == "eps_fs")
                cfg.radio.eps_fs = checked(parse_double(e, path), positive, e, path,
                                           "must be positive");
            else if (e.key == "eps_mp")
                cfg.radio.eps_mp = checked(parse_double(e, path), positive, e, path,
                                           "must be positive");
            else if (e.key == "e_da")
                cfg.radio.e_da = checked(parse_double(e, path), positive, e, path,
                                         "must be positive");
            else if (e.key == "ctrl_bits")
                cfg.radio.ctrl_bits = checked(parse_int(e, path), positive, e, path,
                                              "must be positive");
            else
                e.used = false;
        } else if (e.section == "leach") {
            if (e.key == "p")
                cfg.leach_p =
                    checked(parse_double(e, path), [](double v) { return v > 0.0 && v < 1.0; },
                            e, path, "must be in (0, 1)");
            else
                e.used = false;
        } else if (e.section == "fca") {
            if (e.key == "t")
                cfg.fca_t =
                    checked(parse_double(e, path), [](double v) { return v > 0.0 && v < 1.0; },
                            e, path, "must be in (0, 1)");
            else if (e.key == "r_max")
                cfg.fca_r_max = checked(parse_double(e, path), positive, e, path,
                                        "must be positive");
            else
                e.used = false;
        } else if (e.section == "fuzzy") {
            if (e.key == "distance_close")
                cfg.fuzzy.distance_close = parse_mf(e, path);
            else if (e.key == "distance_medium")
                cfg.fuzzy.distance_medium = parse_mf(e, path);
            else if (e.key == "distance_far")
                cfg.fuzzy.distance_far = parse_mf(e, path);
            else if (e.key == "energy_low")
                cfg.fuzzy.energy_low = parse_mf(e, path);
            else if (e.key == "energy_medium")
                cfg.fuzzy.energy_medium = parse_mf(e, path);
            else if (e.key == "energy_high")
                cfg.fuzzy.energy_high = parse_mf(e, path);
            else if (e.key == "radius_very_small")
                cfg.fuzzy.radius_very_small = parse_mf(e, path);
            else if (e.key == "radius_small")
                cfg.fuzzy.radius_small = parse_mf(e, path);
            else if (e.key == "radius_medium")
                cfg.fuzzy.radius_medium = parse_mf(e, path);
            else if (e.key == "radius_large")
                cfg.fuzzy.radius_large = parse_mf(e, path);
            else if (e.key == "radius_very_large")
                cfg.fuzzy.radius_very_large = parse_mf(e, path);
            else if (e.key == "rules_file") {
                const std::filesystem::path rules_path =
                    path.parent_path() / std::filesystem::path(e.value);
                cfg.fuzzy.rules = detail::parse_rules_file(rules_path);
            } else
                e.used = false;
        } else {
            throw ParseError(detail::loc(path, e.line) + ": unknown section [" + e.section +
                             "]");
        }
        if (!e.used)
            throw ParseError(detail::loc(path, e.line) + ": unknown key '" + e.key + "' in [" +
                             e.section + "]");
    }

    // Cross-key checks: assemble the fuzzy system once so bad breakpoint
    // combinations or a broken rule table fail here, before any trial runs.
    try {
        FuzzyEngine probe(cfg.fuzzy);
    } catch (const std::exception& ex) {
        throw ValidationError(path.string() + ": [fuzzy]: " + ex.what());
    }
    try {
        cfg.validate();
    } catch (const std::exception& ex) {
        throw ValidationError(path.string() + ": " + ex.what());
    }
    return cfg;
}

// Writes the fully resolved configuration: every key explicit, doubles at
// full precision, the rule table in a sibling .rules file. Loading the dump
// reproduces the ScenarioConfig exactly.
inline void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path) {
    using detail::fmt_full;
    using detail::fmt_mf;

    std::filesystem::path rules_path = path;
    rules_path.replace_extension(".rules");

    {
        std::ofstream out(rules_path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write rules file '" + rules_path.string() + "'");
        out << "# rule table: <distance> <energy> <radius>\n";
        for (const FuzzyRule& r : cfg.fuzzy.rules)
            out << r.distance_term << ' ' << r.energy_term << ' ' << r.radius_term << '\n';
    }

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write config file '" + path.string() + "'");
    out << "# effective configuration, all keys explicit\n";
    out << "[scenario]\n";
    out << "area_width = " << fmt_full(cfg.area_width) << "\n";
    out << "area_height = " << fmt_full(cfg.area_height) << "\n";
    out << "bs_x = " << fmt_full(cfg.bs.x) << "\n";
    out << "bs_y = " << fmt_full(cfg.bs.y) << "\n";
    out << "node_count = " << cfg.node_count << "\n";
    out << "initial_energy = " << fmt_full(cfg.initial_energy) << "\n";
    out << "packet_bits = " << cfg.packet_bits << "\n";
    out << "aggregation_ratio = " << fmt_full(cfg.aggregation_ratio) << "\n";
    out << "max_rounds = " << cfg.max_rounds << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "base_seed = " << cfg.base_seed << "\n";
    out << "\n[radio]\n";
    out << "e_elec = " << fmt_full(cfg.radio.e_elec) << "\n";
    out << "eps_fs = " << fmt_full(cfg.radio.eps_fs) << "\n";
    out << "eps_mp = " << fmt_full(cfg.radio.eps_mp) << "\n";
    out << "e_da = " << fmt_full(cfg.radio.e_da) << "\n";
    out << "ctrl_bits = " << cfg.radio.ctrl_bits << "\n";
    out << "\n[leach]\n";
    out << "p = " << fmt_full(cfg.leach_p) << "\n";
    out << "\n[fca]\n";
    out << "t = " << fmt_full(cfg.fca_t) << "\n";
    out << "r_max = " << fmt_full(cfg.fca_r_max) << "\n";
    out << "\n[fuzzy]\n";
    out << "distance_close = " << fmt_mf(cfg.fuzzy.distance_close) << "\n";
    out << "distance_medium = " << fmt_mf(cfg.fuzzy.distance_medium) << "\n";
    out << "distance_far = " << fmt_mf(cfg.fuzzy.distance_far) << "\n";
    out << "energy_low = " << fmt_mf(cfg.fuzzy.energy_low) << "\n";
    out << "energy_medium = " << fmt_mf(cfg.fuzzy.energy_medium) << "\n";
    out << "energy_high = " << fmt_mf(cfg.fuzzy.energy_high) << "\n";
    out << "radius_very_small = " << fmt_mf(cfg.fuzzy.radius_very_small) << "\n";
    out << "radius_small = " << fmt_mf(cfg.fuzzy.radius_small) << "\n";
    out << "radius_medium = " << fmt_mf(cfg.fuzzy.radius_medium) << "\n";
    out << "radius_large = " << fmt_mf(cfg.fuzzy.radius_large) << "\n";
    out << "radius_very_large = " << fmt_mf(cfg.fuzzy.radius_very_large) << "\n";
    out << "rules_file = " << rules_path.filename().string() << "\n";
}

} // namespace wsn
