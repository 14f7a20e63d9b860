#ifndef NLSPECT_SCENARIOS_HPP
#define NLSPECT_SCENARIOS_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlspect/field.hpp"
#include "nlspect/macrostate.hpp"
#include "nlspect/model.hpp"

namespace nlspect {

/// Fully resolved evolution run parsed from a scenario config.
struct RunSetup {
    std::string name;
    Nonlinearity nl = Nonlinearity::linear();
    PotentialSpec V = PotentialSpec::zero();
    FieldState initial;
    EvolutionConfig cfg;
    std::vector<std::pair<double, double>> partial_intervals;
    nlohmann::json config;  // the scenario document, echoed into manifests
};

namespace scenariodetail {

inline void fill_initial(FieldState& s, const nlohmann::json& init) {
    const std::string kind = init.at("kind").get<std::string>();
    const double center = init.value("center", 0.0);
    const double k = init.value("k", 0.0);
    if (kind == "zero") return;
    if (kind == "soliton") {
        const MacrostateProfile psi =
            soliton(init.at("E").get<double>(), init.at("epsilon").get<double>());
        s.fill([&](double x) {
            const double a = psi(x - center);
            return std::pair{a * std::cos(k * x), a * std::sin(k * x)};
        });
        return;
    }
    if (kind == "gausson") {
        const MacrostateProfile psi =
            gausson(init.at("E").get<double>(), init.at("epsilon").get<double>());
        s.fill([&](double x) {
            const double a = psi(x - center);
            return std::pair{a * std::cos(k * x), a * std::sin(k * x)};
        });
        return;
    }
    if (kind == "gaussian") {
        const double sigma0 = init.at("sigma0").get<double>();
        const double amp = std::pow(2.0 * M_PI * sigma0 * sigma0, -0.25);
        s.fill([&](double x) {
            const double u = x - center;
            const double a = amp * std::exp(-u * u / (4.0 * sigma0 * sigma0));
            return std::pair{a * std::cos(k * x), a * std::sin(k * x)};
        });
        return;
    }
    throw DomainError("unknown initial condition kind: " + kind);
}

}  // namespace scenariodetail

/// Parses a scenario document:
/// { "name", "nonlinearity", "potential", "initial", "grid": {x_min, x_max,
///   points}, "evolution": {dt, t_end, record_every, fixed_point_tol,
///   max_fp_iters, absorber: {width, strength}}, "partial_intervals": [[a,b]..] }
inline RunSetup parse_scenario(const nlohmann::json& doc) {
    RunSetup run;
    run.config = doc;
    run.name = doc.value("name", "run");
    run.nl = nonlinearity_from_json(doc.at("nonlinearity"));
    run.V = doc.contains("potential") ? potential_from_json(doc.at("potential"))
                                      : PotentialSpec::zero();

    const auto& grid = doc.value("grid", nlohmann::json::object());
    run.initial = FieldState::zero_grid(grid.value("x_min", -16.0),
                                        grid.value("x_max", 16.0),
                                        grid.value("points", std::size_t{801}));
    if (doc.contains("initial")) scenariodetail::fill_initial(run.initial, doc.at("initial"));

    const auto& ev = doc.value("evolution", nlohmann::json::object());
    run.cfg.dt = ev.value("dt", 2e-4);
    run.cfg.t_end = ev.value("t_end", 1.0);
    run.cfg.record_every = ev.value("record_every", 500);
    run.cfg.fixed_point_tol = ev.value("fixed_point_tol", 1e-12);
    run.cfg.max_fp_iters = ev.value("max_fp_iters", 50);
    if (ev.contains("absorber") && !ev.at("absorber").is_null())
        run.cfg.absorber = Absorber{ev.at("absorber").value("width", 2.0),
                                    ev.at("absorber").value("strength", 1.0)};

    for (const auto& iv : doc.value("partial_intervals", nlohmann::json::array()))
        run.partial_intervals.emplace_back(iv.at(0).get<double>(), iv.at(1).get<double>());
    return run;
}

/// Built-in figure-reproduction scenarios. Initial-state parameters that the
/// figures leave open are pinned here (gausson with unit amplitude E = 1,
/// eps = -1; soliton E = -0.5, eps = -1) and echoed in every manifest.
inline std::map<std::string, nlohmann::json> builtin_scenarios() {
    using nlohmann::json;
    std::map<std::string, json> m;

    const json gausson_ic = {{"kind", "gausson"}, {"E", 1.0}, {"epsilon", -1.0}};
    const json soliton_ic = {{"kind", "soliton"}, {"E", -0.5}, {"epsilon", -1.0}};
    const json log_nl = {{"kind", "logarithmic"}, {"epsilon", -1.0}};
    const json zak_nl = {{"kind", "zakharov"}, {"epsilon", -1.0}};
    const json absorber = {{"width", 3.0}, {"strength", 1.0}};

    // Little well under the cue; the packet settles onto the well center.
    m["fig7a"] = {{"name", "fig7a"},
                  {"nonlinearity", log_nl},
                  {"potential", {{"kind", "bump"}, {"V0", -0.75}, {"xv", 2.0}, {"sigma", 0.5}}},
                  {"initial", gausson_ic},
                  {"evolution",
                   {{"dt", 2e-4}, {"t_end", 120.0}, {"record_every", 500}, {"absorber", absorber}}},
                  {"partial_intervals", {{-8.0, 10.0}}}};
    m["fig7b"] = m["fig7a"];
    m["fig7b"]["name"] = "fig7b";
    m["fig7b"]["nonlinearity"] = zak_nl;
    m["fig7b"]["initial"] = soliton_ic;

    // Barrier almost under the packet maximum: deflection / emission / split.
    for (auto [tag, V0] : {std::pair{"fig8a", 0.5}, {"fig8b", 1.0}, {"fig8c", 2.0}}) {
        m[tag] = {{"name", tag},
                  {"nonlinearity", log_nl},
                  {"potential", {{"kind", "bump"}, {"V0", V0}, {"xv", 0.001}, {"sigma", 0.5}}},
                  {"initial", gausson_ic},
                  {"evolution",
                   {{"dt", 2e-4}, {"t_end", 15.0}, {"record_every", 500}, {"absorber", absorber}}},
                  {"partial_intervals", {{-16.0, -1.0}, {-1.0, 1.0}, {1.0, 16.0}}}};
    }

    // Traveling soliton against a barrier at x = 4. A deeper soliton (E = -1)
    // and a slightly narrower barrier keep the three regimes (reflect / split /
    // transmit) cleanly separated at the pinned k, V0 pairs.
    const json wide_grid = {{"x_min", -32.0}, {"x_max", 32.0}, {"points", 1601}};
    for (auto [tag, k, V0, t_end] :
         {std::tuple{"fig9a", 0.5, 1.0, 30.0}, {"fig9b", 0.7, 1.0, 26.0},
          {"fig9c", 1.0, 0.5, 18.0}}) {
        json ic = {{"kind", "soliton"}, {"E", -1.0}, {"epsilon", -1.0}};
        ic["center"] = -4.0;
        ic["k"] = k;
        m[tag] = {{"name", tag},
                  {"nonlinearity", zak_nl},
                  {"potential", {{"kind", "bump"}, {"V0", V0}, {"xv", 4.0}, {"sigma", 0.4}}},
                  {"initial", ic},
                  {"grid", wide_grid},
                  {"evolution",
                   {{"dt", 2e-4}, {"t_end", t_end}, {"record_every", 1000}, {"absorber", absorber}}},
                  {"partial_intervals", {{-32.0, 3.5}, {3.5, 4.5}, {4.5, 32.0}}}};
    }

    // Soliton at rest between two tiny wells at x = +-2 (bi-localization).
    for (auto [tag, V0] : {std::pair{"fig10a", -0.5}, {"fig10b", -1.0}}) {
        json wells = {{"kind", "bump_sum"},
                      {"bumps",
                       {{{"V0", V0}, {"xv", -2.0}, {"sigma", 0.5}},
                        {{"V0", V0}, {"xv", 2.0}, {"sigma", 0.5}}}}};
        m[tag] = {{"name", tag},
                  {"nonlinearity", zak_nl},
                  {"potential", wells},
                  {"initial", soliton_ic},
                  {"evolution",
                   {{"dt", 2e-4}, {"t_end", 60.0}, {"record_every", 500}, {"absorber", absorber}}},
                  {"partial_intervals", {{-12.0, 12.0}}}};
    }
    return m;
}

}  // namespace nlspect

#endif
