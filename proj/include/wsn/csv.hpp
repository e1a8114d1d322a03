#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/sim.hpp"

// Result files. Everything is CSV with a header row, LF line ends, and
// floats at six significant digits, so a rerun of the same scenario produces
// byte-identical files. Lifetime metrics that never triggered (the network
// outlived the round cap) are left as empty fields.

namespace wsn {

namespace detail {

inline std::string fmt_g6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string opt_metric(const std::optional<std::int64_t>& v) {
    return v ? std::to_string(*v) : std::string{};
}

inline std::string opt_g6(const std::optional<double>& v) {
    return v ? fmt_g6(*v) : std::string{};
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write output file '" + path.string() + "'");
    out << content;
}

} // namespace detail

inline const char* protocol_name(Protocol p) {
    return p == Protocol::Leach ? "leach" : "fca";
}

// Writes summary.csv, trials.csv, one series_<protocol>.csv per protocol
// present, and the effective config (with its rule table). Returns the paths
// written.
inline std::vector<std::filesystem::path> emit_results(const AggregateResult& result,
                                                       const ScenarioConfig& cfg,
                                                       const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    using detail::fmt_g6;
    using detail::opt_g6;
    using detail::opt_metric;

    fs::create_directories(out_dir);
    std::vector<fs::path> written;

    struct Entry {
        Protocol protocol;
        const ProtocolAggregate* agg;
    };
    std::vector<Entry> present;
    if (result.leach)
        present.push_back({Protocol::Leach, &*result.leach});
    if (result.fca)
        present.push_back({Protocol::Fca, &*result.fca});

    {
        std::string s = "protocol,mean_fnd,std_fnd,mean_hna,std_hna,win_rate_fnd,win_rate_hna\n";
        for (const Entry& e : present) {
            s += protocol_name(e.protocol);
            s += ',' + opt_g6(e.agg->mean_fnd) + ',' + opt_g6(e.agg->std_fnd);
            s += ',' + opt_g6(e.agg->mean_hna) + ',' + opt_g6(e.agg->std_hna);
            s += ',' + opt_g6(result.win_rate_fnd) + ',' + opt_g6(result.win_rate_hna);
            s += '\n';
        }
        const fs::path p = out_dir / "summary.csv";
        detail::write_file(p, s);
        written.push_back(p);
    }

    {
        std::string s = "protocol,trial,seed,fnd,hna\n";
        for (const Entry& e : present) {
            for (std::size_t t = 0; t < e.agg->trials.size(); ++t) {
                const TrialResult& tr = e.agg->trials[t];
                s += protocol_name(e.protocol);
                s += ',' + std::to_string(t) + ',' + std::to_string(tr.seed);
                s += ',' + opt_metric(tr.fnd) + ',' + opt_metric(tr.hna) + '\n';
            }
        }
        const fs::path p = out_dir / "trials.csv";
        detail::write_file(p, s);
        written.push_back(p);
    }

    for (const Entry& e : present) {
        std::string s = "round,mean_alive,mean_heads,mean_energy_j\n";
        for (const MeanSeriesPoint& pt : e.agg->series) {
            s += std::to_string(pt.round);
            s += ',' + fmt_g6(pt.alive) + ',' + fmt_g6(pt.heads) + ',' +
                 fmt_g6(pt.energy_consumed) + '\n';
        }
        const fs::path p = out_dir / (std::string("series_") + protocol_name(e.protocol) +
                                      ".csv");
        detail::write_file(p, s);
        written.push_back(p);
    }

    const fs::path cfg_path = out_dir / "effective_config.ini";
    save_config(cfg, cfg_path);
    written.push_back(cfg_path);
    written.push_back(out_dir / "effective_config.rules");

    return written;
}

} // namespace wsn
