// Command-line front end: bifurcation spectra, delta-well closed forms,
// macrostate profiles and perturbation scans, and symplectic field evolution.
//
// Exit codes: 0 ok, 2 config error, 3 empty result, 4 numerical failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nlspect/io.hpp"
#include "nlspect/macrostate.hpp"
#include "nlspect/scenarios.hpp"
#include "nlspect/spectral.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct GlobalOpts {
    std::string out_dir = ".";
    unsigned threads = 0;
    bool quiet = false;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    return json::parse(in);
}

double elapsed(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> q_a_grid_from_json(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int count = j.at("count").get<int>();
    std::vector<double> g;
    for (int i = 0; i < count; ++i)
        g.push_back(count > 1 ? lo + (hi - lo) * i / double(count - 1) : lo);
    return g;
}

int cmd_spectrum(const GlobalOpts& g, const std::string& config_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg;
    nlspect::Nonlinearity nl = nlspect::Nonlinearity::linear();
    nlspect::PotentialSpec V = nlspect::PotentialSpec::zero();
    std::vector<double> q_as;
    double Elo = 0, Ehi = 0;
    int n_max = 0;
    nlspect::SpectralConfig scfg;
    try {
        cfg = load_json(config_path);
        nl = nlspect::nonlinearity_from_json(cfg.at("nonlinearity"));
        V = nlspect::potential_from_json(cfg.at("potential"));
        q_as = q_a_grid_from_json(cfg.at("q_a"));
        Elo = cfg.at("E_range").at(0).get<double>();
        Ehi = cfg.at("E_range").at(1).get<double>();
        n_max = cfg.value("n_max", 4);
        if (cfg.contains("shooting")) {
            scfg.dt = cfg["shooting"].value("dt", scfg.dt);
            scfg.scan_points = cfg["shooting"].value("scan_points", scfg.scan_points);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const std::string name = cfg.value("name", "spectrum");
    const fs::path stem = fs::path(g.out_dir) / name;
    fs::create_directories(g.out_dir);

    const nlspect::BranchMap map =
        nlspect::build_branch_map(q_as, nl, V, Elo, Ehi, n_max, scfg, g.threads);

    std::size_t total = 0;
    {
        nlspect::CsvWriter csv(stem.string() + "_branches.csv");
        csv.header({"q_a", "n", "E", "pseudonorm", "norm_valid"});
        for (const auto& pts : map.per_q_a)
            for (const auto& p : pts) {
                csv.row({p.q_a, double(p.n), p.E, p.pseudonorm, p.norm_valid ? 1.0 : 0.0});
                ++total;
            }
    }

    if (cfg.contains("N_targets")) {
        nlspect::CsvWriter csv(stem.string() + "_isonorm.csv");
        csv.header({"N_target", "n", "q_a", "E", "pseudonorm"});
        for (double N : cfg["N_targets"].get<std::vector<double>>()) {
            const auto pts = nlspect::isonorm_eigenvalues(N, nl, V, q_as, Elo, Ehi,
                                                          n_max, scfg, g.threads);
            for (const auto& p : pts)
                csv.row({N, double(p.n), p.q_a, p.E, p.pseudonorm});
        }
    }

    nlspect::write_manifest(stem.string() + "_manifest.json", "spectrum", cfg,
                            elapsed(t0));
    if (!g.quiet)
        std::cout << "spectrum: " << total << " branch points -> " << stem.string()
                  << "_*.csv\n";
    return total == 0 ? 3 : 0;
}

int cmd_delta_well(const GlobalOpts& g, double omega, double eps, double norm,
                   double q0) {
    if (norm != 1.0) {
        std::cerr << "config error: only the norm-1 closed form is available\n";
        return 2;
    }
    if (q0 > 0.0) {
        const double E = nlspect::delta_well_E(
            omega, eps, nlspect::Nonlinearity::zakharov(eps), q0);
        if (!g.quiet) std::cout << "E(q0=" << q0 << ") = " << E << "\n";
    }
    const auto E = nlspect::delta_well_norm1(omega, eps);
    if (!E) {
        std::cout << "no localization: eps > " << (omega > 0 ? "2*Omega" : "4*Omega")
                  << "\n";
        return 3;
    }
    std::cout << "E = " << *E << "\n";
    return 0;
}

int cmd_macrostate(const GlobalOpts& g, const std::string& kind, double E, double eps,
                   double x_max, int points, const std::vector<double>& lambdas,
                   double pulse_xv, double pulse_sigma) {
    const auto t0 = std::chrono::steady_clock::now();
    nlspect::MacrostateProfile psi{nlspect::MacrostateKind::Soliton, E, eps};
    try {
        psi = (kind == "gausson") ? nlspect::gausson(E, eps) : nlspect::soliton(E, eps);
    } catch (const nlspect::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    fs::create_directories(g.out_dir);
    const fs::path stem = fs::path(g.out_dir) / ("macrostate_" + kind);
    {
        nlspect::CsvWriter csv(stem.string() + "_profile.csv");
        csv.header({"x", "psi"});
        for (int i = 0; i < points; ++i) {
            const double x = -x_max + 2.0 * x_max * i / double(points - 1);
            csv.row({x, psi(x)});
        }
    }

    if (!lambdas.empty()) {
        const nlspect::Nonlinearity nl =
            kind == "gausson" ? nlspect::Nonlinearity::logarithmic(eps)
                              : nlspect::Nonlinearity::zakharov(eps);
        nlspect::CsvWriter csv(stem.string() + "_perturbation.csv");
        csv.header({"lambda", "H0_after", "verdict"});
        for (double lam : lambdas) {
            const auto pulse = nlspect::PotentialSpec::bump(lam, pulse_xv, pulse_sigma);
            // Start well before the pulse, on the rising cue.
            const double t_start = pulse_xv - pulse_sigma - 2.0;
            const double q_start = psi(t_start);
            const auto eta0 = nlspect::eta(q_start, E, nl);
            if (!eta0) {
                std::cerr << "cue undefined at the start point\n";
                return 2;
            }
            const auto outcome = nlspect::classify_perturbation(
                E, nl, pulse, {q_start, *eta0, t_start});
            const double verdict =
                outcome.verdict == nlspect::PerturbationVerdict::ReturnsToOrigin ? 0.0
                : outcome.verdict == nlspect::PerturbationVerdict::InnerCirculation
                    ? -1.0
                    : 1.0;
            csv.row({lam, outcome.H0_after, verdict});
        }
    }

    json cfg = {{"kind", kind}, {"E", E}, {"epsilon", eps}};
    nlspect::write_manifest(stem.string() + "_manifest.json", "macrostate", cfg,
                            elapsed(t0));
    if (!g.quiet) std::cout << "macrostate -> " << stem.string() << "_*.csv\n";
    return 0;
}

int cmd_evolve(const GlobalOpts& g, const std::string& scenario,
               const std::string& config_path) {
    const auto t0 = std::chrono::steady_clock::now();
    json doc;
    try {
        if (!config_path.empty()) {
            doc = load_json(config_path);
        } else {
            const auto builtin = nlspect::builtin_scenarios();
            const auto it = builtin.find(scenario);
            if (it == builtin.end())
                throw std::runtime_error("unknown scenario " + scenario);
            doc = it->second;
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    nlspect::RunSetup run;
    try {
        run = nlspect::parse_scenario(doc);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    fs::create_directories(g.out_dir);
    const fs::path stem = fs::path(g.out_dir) / run.name;

    nlspect::CsvWriter snaps(stem.string() + "_snapshots.csv");
    snaps.header({"t", "x", "density", "Q", "P"});
    auto on_record = [&](const nlspect::FieldState& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            snaps.row({s.t, s.x(i), s.Q[i] * s.Q[i] + s.P[i] * s.P[i], s.Q[i], s.P[i]});
    };

    const double N0 = nlspect::field_norm(run.initial);
    try {
        auto [final_state, diag] = nlspect::evolve(run.initial, run.nl, run.V, run.cfg,
                                                   run.partial_intervals, on_record);
        nlspect::write_diagnostics_csv(stem.string() + "_diagnostics.csv", diag);
        if (const auto* bump = std::get_if<nlspect::Bump>(&run.V.rep());
            bump && bump->V0 > 0.0 && N0 > 0.0) {
            const auto rep = nlspect::scattering_report(final_state, *bump, N0);
            if (!g.quiet)
                std::cout << "scattering: reflected=" << rep.reflected
                          << " trapped=" << rep.trapped
                          << " transmitted=" << rep.transmitted
                          << " absorbed=" << rep.absorbed
                          << (rep.conclusive ? "" : " (inconclusive)") << "\n";
        }
    } catch (const nlspect::FixedPointDiverged& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }

    nlspect::write_manifest(stem.string() + "_manifest.json", "evolve", doc, elapsed(t0));
    if (!g.quiet) std::cout << "evolve " << run.name << " -> " << stem.string() << "_*.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bifurcation spectra and symplectic evolution for 1-D nonlinear "
                 "Schrodinger models"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--out", g.out_dir, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware)");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    std::string config_path, scenario;

    auto* spectrum = app.add_subcommand("spectrum", "Branch map and isonorm spectra");
    spectrum->add_option("--config", config_path, "Scan config JSON")->required();

    double omega = 1.0, eps = 0.0, norm = 1.0, q0 = 0.0;
    auto* dw = app.add_subcommand("delta-well", "Delta-well closed-form eigenvalues");
    dw->add_option("--omega", omega, "Well strength Omega")->required();
    dw->add_option("--epsilon", eps, "Coupling epsilon")->required();
    dw->add_option("--norm", norm, "Packet norm (only 1 supported)");
    dw->add_option("--q0", q0, "Also print the general eigenvalue at this q0");

    std::string kind = "soliton";
    double E = -0.5, x_max = 8.0, pulse_xv = -6.0, pulse_sigma = 0.2;
    int points = 801;
    std::vector<double> lambdas;
    auto* mac = app.add_subcommand("macrostate", "Closed-form profiles and perturbation scans");
    mac->add_option("--kind", kind, "soliton | gausson");
    mac->add_option("--E", E, "Frequency eigenvalue");
    mac->add_option("--epsilon", eps, "Coupling epsilon")->required();
    mac->add_option("--x-max", x_max, "Half-width of the profile output");
    mac->add_option("--points", points, "Profile sample count");
    mac->add_option("--perturb-lambdas", lambdas, "Pulse amplitudes to classify");
    mac->add_option("--pulse-xv", pulse_xv, "Pulse center (under a rising cue)");
    mac->add_option("--pulse-sigma", pulse_sigma, "Pulse half-width");

    auto* ev = app.add_subcommand("evolve", "Symplectic field evolution");
    ev->add_option("--scenario", scenario, "Built-in scenario name");
    ev->add_option("--config", config_path, "Scenario config JSON");

    auto* ls = app.add_subcommand("list-scenarios", "List built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) return cmd_spectrum(g, config_path);
        if (dw->parsed()) return cmd_delta_well(g, omega, eps, norm, q0);
        if (mac->parsed())
            return cmd_macrostate(g, kind, E, eps, x_max, points, lambdas, pulse_xv,
                                  pulse_sigma);
        if (ev->parsed()) {
            if (scenario.empty() && config_path.empty()) {
                std::cerr << "config error: need --scenario or --config\n";
                return 2;
            }
            return cmd_evolve(g, scenario, config_path);
        }
        if (ls->parsed()) {
            for (const auto& [name, doc] : nlspect::builtin_scenarios())
                std::cout << name << "\n";
            return 0;
        }
    } catch (const nlspect::DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
