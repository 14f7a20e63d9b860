#ifndef NLSPECT_IO_HPP
#define NLSPECT_IO_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlspect/classical.hpp"
#include "nlspect/field.hpp"

namespace nlspect {

inline constexpr const char* kCodeVersion = "nlspect 0.1.0";

/// Minimal deterministic CSV emitter: header row, '.' decimal, no locale,
/// shortest round-trip doubles.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path);
    }

    void comment(const std::string& line) { out_ << "# " << line << "\n"; }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& vals) {
        char buf[32];
        for (std::size_t i = 0; i < vals.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

    void raw_row(const std::string& line) { out_ << line << "\n"; }

  private:
    std::ofstream out_;
};

/// Trajectory export: t,q,p with header comments carrying E, eps, potential.
inline void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                                 double E, const Nonlinearity& nl,
                                 const PotentialSpec& V) {
    CsvWriter csv(path);
    nlohmann::json jnl, jv;
    to_json(jnl, nl);
    to_json(jv, V);
    csv.comment("E=" + std::to_string(E));
    csv.comment("nonlinearity=" + jnl.dump());
    csv.comment("potential=" + jv.dump());
    csv.header({"t", "q", "p"});
    for (const auto& s : traj.samples) csv.row({s.t, s.q, s.p});
}

/// Run manifest; every output file of a run references it by filename stem.
/// The clock lives here so the data files stay byte-identical across runs.
inline void write_manifest(const std::string& path, const std::string& command,
                           const nlohmann::json& config, double wall_seconds) {
    nlohmann::json m = {{"command", command},
                        {"config", config},
                        {"seed_independent", true},
                        {"code_version", kCodeVersion},
                        {"wall_time_seconds", wall_seconds}};
    std::ofstream out(path);
    out << m.dump(2) << "\n";
}

inline void write_diagnostics_csv(const std::string& path,
                                  const DiagnosticsSeries& diag) {
    CsvWriter csv(path);
    std::vector<std::string> cols = {"t", "N", "H", "E"};
    for (const auto& iv : diag.partial_intervals)
        cols.push_back("n_[" + std::to_string(iv.first) + "," +
                       std::to_string(iv.second) + "]");
    csv.header(cols);
    for (std::size_t i = 0; i < diag.times.size(); ++i) {
        std::vector<double> row = {diag.times[i], diag.norm[i], diag.H[i],
                                   diag.E_func[i]};
        for (const auto& series : diag.partial) row.push_back(series[i]);
        csv.row(row);
    }
}

}  // namespace nlspect

#endif
