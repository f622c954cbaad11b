#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pieq/economy.hpp"
#include "pieq/game.hpp"
#include "pieq/instance_io.hpp"
#include "pieq/selection.hpp"

namespace py = pybind11;
using pieq::io::Json;

namespace {

py::object json_to_py(const Json& j) {
    py::module_ json = py::module_::import("json");
    return json.attr("loads")(j.dump());
}

pieq::SolveConfig merged_config(const pieq::io::Instance& inst, std::int64_t budget,
                                std::int64_t seed, bool theorem4) {
    pieq::SolveConfig c = inst.config;
    if (budget >= 0) c.budget = budget;
    if (seed >= 0) c.seed = static_cast<std::uint64_t>(seed);
    if (theorem4) c.theorem4 = true;
    return c;
}

const pieq::Economy& economy_of(const pieq::io::Instance& inst) {
    if (!inst.economy) throw py::value_error("instance is not an economy");
    return *inst.economy;
}

const pieq::PrivateInfoGame& game_of(const pieq::io::Instance& inst) {
    if (!inst.game) throw py::value_error("instance is not a game");
    return *inst.game;
}

pieq::StrategyProfile profile_from_dict(const pieq::io::Instance& inst, const py::dict& d) {
    auto lookup = [&](const std::string& player, const std::string& cell) -> std::string {
        py::object pj = d[py::str(player)];
        return py::cast<std::string>(pj[py::str(cell)]);
    };
    pieq::StrategyProfile profile;
    auto build = [&](const auto& owner) {
        for (int i = 0; i < owner.num_players(); ++i) {
            const auto& pl = owner.player(i);
            pieq::Selection g;
            g.choice.assign(static_cast<std::size_t>(owner.type_space(i).size()), -1);
            for (std::size_t c = 0; c < pl.cell_names.size(); ++c) {
                std::string action = lookup(pl.name, pl.cell_names[c]);
                auto it = std::find(pl.actions.begin(), pl.actions.end(), action);
                if (it == pl.actions.end())
                    throw py::value_error("unknown action '" + action + "'");
                int a = static_cast<int>(it - pl.actions.begin());
                for (int atom : pl.type_cells[c]) g.choice[static_cast<std::size_t>(atom)] = a;
            }
            profile.strategies.push_back(std::move(g));
        }
    };
    if (inst.economy)
        build(*inst.economy);
    else
        build(*inst.game);
    return profile;
}

}  // namespace

PYBIND11_MODULE(_pieq, m) {
    m.doc() = "finite private-information equilibrium toolkit";

    py::register_exception<pieq::io::SchemaError>(m, "SchemaError");
    py::register_exception<pieq::io::SemanticError>(m, "SemanticError");
    py::register_exception<pieq::io::BudgetError>(m, "BudgetError");

    py::class_<pieq::io::Instance>(m, "Instance")
        .def_readonly("kind", &pieq::io::Instance::kind)
        .def_property_readonly("hash",
                               [](const pieq::io::Instance& i) { return pieq::io::instance_hash(i); })
        .def("save", [](const pieq::io::Instance& i) { return pieq::io::save(i); })
        .def_property_readonly(
            "config", [](const pieq::io::Instance& i) { return json_to_py(pieq::io::config_json(i.config)); })
        .def_property_readonly("num_players", [](const pieq::io::Instance& i) {
            return i.economy ? i.economy->num_players() : i.game->num_players();
        });

    m.def("load", &pieq::io::load, py::arg("path"), py::arg("refine") = 0);
    m.def(
        "load_document",
        [](const std::string& text, int refine) {
            Json doc;
            try {
                doc = Json::parse(text);
            } catch (const Json::exception& e) {
                throw pieq::io::SchemaError(std::string("JSON parse error: ") + e.what());
            }
            return pieq::io::load_document(doc, refine);
        },
        py::arg("text"), py::arg("refine") = 0);

    m.def(
        "solve",
        [](const pieq::io::Instance& inst, std::int64_t budget, std::int64_t seed,
           bool theorem4) {
            const auto& econ = economy_of(inst);
            auto cfg = merged_config(inst, budget, seed, theorem4);
            auto res = econ.find_equilibrium(cfg);
            Json out{{"status", res.certificate ? "found" : "none"},
                     {"strategy", res.report.strategy},
                     {"complete", res.report.complete},
                     {"hypothesis_violations", res.report.hypothesis_violations},
                     {"certificate", res.certificate
                                         ? pieq::io::certificate_json(econ, *res.certificate)
                                         : Json(nullptr)}};
            return json_to_py(out);
        },
        py::arg("instance"), py::arg("budget") = -1, py::arg("seed") = -1,
        py::arg("theorem4") = false);

    m.def(
        "solve_game",
        [](const pieq::io::Instance& inst, std::int64_t budget, std::int64_t seed) {
            const auto& game = game_of(inst);
            auto cfg = merged_config(inst, budget, seed, false);
            auto res = game.find_nash(cfg);
            Json out{{"status", res.status},
                     {"exhaustive", res.exhaustive},
                     {"profiles_scanned", res.profiles_scanned},
                     {"profile", res.profile ? pieq::io::profile_json(inst, *res.profile)
                                             : Json(nullptr)}};
            return json_to_py(out);
        },
        py::arg("instance"), py::arg("budget") = -1, py::arg("seed") = -1);

    m.def(
        "verify",
        [](const pieq::io::Instance& inst, const py::dict& profile_dict) {
            pieq::StrategyProfile profile = profile_from_dict(inst, profile_dict);
            Json out;
            if (inst.economy) {
                auto check = inst.economy->is_equilibrium(profile);
                Json failures = Json::array();
                for (const auto& rec : check.failures) {
                    const auto& pl = inst.economy->player(rec.player);
                    failures.push_back(
                        Json{{"player", pl.name},
                             {"cell", pl.cell_names[static_cast<std::size_t>(rec.cell)]},
                             {"cond1", rec.cond1},
                             {"cond2", rec.cond2}});
                }
                out = Json{{"valid", check.ok}, {"failures", failures}};
            } else {
                const auto& game = *inst.game;
                game.validate_profile(profile);
                auto rep = game.check_nash(profile, inst.config.eps, inst.config.budget);
                out = Json{{"valid", rep.is_nash},
                           {"worst_gain", rep.worst_gain},
                           {"exhaustive", rep.exhaustive}};
            }
            return json_to_py(out);
        },
        py::arg("instance"), py::arg("profile"));

    m.def(
        "audit",
        [](const pieq::io::Instance& inst) {
            Json out;
            if (inst.game) {
                auto a = inst.game->audit_hypotheses();
                out = Json{{"atomicity", a.atomicity},
                           {"independence_deviation", a.independence_deviation},
                           {"ui_bound", a.ui_bound},
                           {"continuity_note", a.continuity_note}};
            } else {
                auto a = inst.economy->audit_hypotheses(inst.config);
                Json players = Json::array();
                for (std::size_t i = 0; i < a.players.size(); ++i) {
                    const auto& pa = a.players[i];
                    players.push_back(Json{
                        {"player", inst.economy->player(static_cast<int>(i)).name},
                        {"atomicity", pa.atomicity},
                        {"alpha_nonempty", pa.alpha_nonempty},
                        {"pref_nonempty", pa.pref_nonempty},
                        {"alpha_usc", pa.alpha_usc},
                        {"pref_usc", pa.pref_usc},
                        {"alpha_closed_form", pa.alpha_closed_form},
                        {"pref_closed_form", pa.pref_closed_form},
                        {"irreflexivity_violations", pa.irreflexivity_violations},
                        {"ui_size", pa.ui_size},
                        {"ui_open_violations", pa.ui_open_violations}});
                }
                out = Json{{"players", players}, {"theorem4_mode", a.theorem4_mode}};
            }
            return json_to_py(out);
        },
        py::arg("instance"));

    m.def(
        "purify",
        [](const pieq::io::Instance& inst, const std::string& player,
           const std::vector<double>& target) {
            const pieq::Correspondence* constraint = nullptr;
            const pieq::FiniteProbSpace* space = nullptr;
            std::vector<std::string> actions;
            std::vector<std::vector<int>> cells;
            std::vector<std::string> cell_names;
            auto scan = [&](const auto& owner) {
                for (int i = 0; i < owner.num_players(); ++i)
                    if (owner.player(i).name == player) {
                        constraint = &owner.player(i).constraint;
                        space = &owner.type_space(i);
                        actions = owner.player(i).actions;
                        cells = owner.player(i).type_cells;
                        cell_names = owner.player(i).cell_names;
                    }
            };
            if (inst.economy)
                scan(*inst.economy);
            else
                scan(*inst.game);
            if (!constraint) throw py::value_error("unknown player '" + player + "'");
            if (target.size() != actions.size())
                throw py::value_error("target length must match the action count");
            auto res = pieq::purify(*constraint, *space, pieq::Distribution(actions, target),
                                    inst.config.tol);
            Json selection = Json::object();
            for (std::size_t c = 0; c < cells.size(); ++c)
                selection[cell_names[c]] = actions[static_cast<std::size_t>(
                    res.selection.choice[static_cast<std::size_t>(cells[c].front())])];
            return json_to_py(Json{{"selection", selection}, {"error", res.error}});
        },
        py::arg("instance"), py::arg("player"), py::arg("target"));

    m.def(
        "dsl_canonical",
        [](const std::string& text) { return pieq::dsl::print_canonical(pieq::dsl::parse(text)); },
        py::arg("text"), "parse a predicate and return its canonical form");
}
