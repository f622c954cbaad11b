// pieq: solver / verifier / auditor for finite private-information games
// and abstract economies. One command per invocation; all output is a
// single deterministic JSON report.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pieq/economy.hpp"
#include "pieq/game.hpp"
#include "pieq/instance_io.hpp"
#include "pieq/selection.hpp"

namespace {

using pieq::io::Json;

struct Options {
    std::string command;
    std::string instance_path;
    std::string profile_path;
    std::string out_path;
    std::string player;
    std::string target;           // comma list over the player's action order
    std::string ks = "1,2,4,8";   // refine-study levels
    std::int64_t seed = -1;       // -1: keep instance value
    std::int64_t budget = -1;
    int refine = 0;
    bool theorem4 = false;
    bool timing = false;
};

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw pieq::io::SchemaError("expected a comma-separated integer list");
    return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw pieq::io::SchemaError("expected a comma-separated number list");
    return out;
}

pieq::io::Instance load_with_overrides(const Options& opt) {
    pieq::io::Instance inst = pieq::io::load(opt.instance_path, opt.refine);
    if (opt.seed >= 0) inst.config.seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.budget >= 0) inst.config.budget = opt.budget;
    if (opt.theorem4) inst.config.theorem4 = true;
    return inst;
}

const pieq::Economy& economy_of(const pieq::io::Instance& inst) {
    if (!inst.economy)
        throw pieq::io::SemanticError("this command needs an economy instance");
    return *inst.economy;
}

const pieq::PrivateInfoGame& game_of(const pieq::io::Instance& inst) {
    if (!inst.game) throw pieq::io::SemanticError("this command needs a game instance");
    return *inst.game;
}

Json cmd_solve(const pieq::io::Instance& inst) {
    const auto& econ = economy_of(inst);
    auto res = econ.find_equilibrium(inst.config);
    Json out;
    out["status"] = res.certificate ? "found" : "none";
    out["strategy"] = res.report.strategy;
    out["complete"] = res.report.complete;
    out["lambda_tuples_scanned"] = res.report.lambda_tuples_scanned;
    out["fixed_points_found"] = res.report.fixed_points_found;
    out["hypothesis_violations"] = res.report.hypothesis_violations;
    out["certificate"] =
        res.certificate ? pieq::io::certificate_json(econ, *res.certificate) : Json(nullptr);
    return out;
}

Json cmd_solve_game(const pieq::io::Instance& inst) {
    const auto& game = game_of(inst);
    auto res = game.find_nash(inst.config);
    Json out;
    out["status"] = res.status;
    out["exhaustive"] = res.exhaustive;
    out["profiles_scanned"] = res.profiles_scanned;
    out["profile"] =
        res.profile ? pieq::io::profile_json(inst, *res.profile) : Json(nullptr);
    return out;
}

Json cmd_verify(const pieq::io::Instance& inst, const Options& opt) {
    if (opt.profile_path.empty())
        throw pieq::io::SchemaError("verify needs --profile");
    pieq::StrategyProfile profile = pieq::io::load_profile(opt.profile_path, inst);
    Json out;
    if (inst.economy) {
        const auto& econ = *inst.economy;
        pieq::EquilibriumCheck check;
        try {
            check = econ.is_equilibrium(profile);
        } catch (const std::invalid_argument& e) {
            throw pieq::io::SemanticError(e.what());
        }
        out["valid"] = check.ok;
        Json failures = Json::array();
        for (const auto& rec : check.failures) {
            const auto& pl = econ.player(rec.player);
            failures.push_back(Json{{"player", pl.name},
                                    {"cell", pl.cell_names[static_cast<std::size_t>(rec.cell)]},
                                    {"cond1", rec.cond1},
                                    {"cond2", rec.cond2}});
        }
        out["failures"] = failures;
        out["certificate"] = check.certificate
                                 ? pieq::io::certificate_json(econ, *check.certificate)
                                 : Json(nullptr);
    } else {
        const auto& game = game_of(inst);
        try {
            game.validate_profile(profile);
        } catch (const std::invalid_argument& e) {
            throw pieq::io::SemanticError(e.what());
        }
        auto report = game.check_nash(profile, inst.config.eps, inst.config.budget);
        out["valid"] = report.is_nash;
        out["worst_gain"] = report.worst_gain;
        out["worst_player"] =
            report.worst_player >= 0 ? Json(game.player(report.worst_player).name) : Json(nullptr);
        out["exhaustive"] = report.exhaustive;
    }
    return out;
}

Json cmd_audit(const pieq::io::Instance& inst) {
    Json out;
    if (inst.game) {
        const auto& game = *inst.game;
        auto audit = game.audit_hypotheses();
        Json a = Json::array(), b = Json::array(), d = Json::array();
        for (int i = 0; i < game.num_players(); ++i) {
            const std::string& name = game.player(i).name;
            a.push_back(Json{{"player", name},
                             {"atomicity", audit.atomicity[static_cast<std::size_t>(i)]}});
            b.push_back(Json{
                {"player", name},
                {"deviation", audit.independence_deviation[static_cast<std::size_t>(i)]}});
            d.push_back(
                Json{{"player", name}, {"bound", audit.ui_bound[static_cast<std::size_t>(i)]}});
        }
        out["T2a"] = a;
        out["T2b"] = b;
        out["T2c"] = audit.continuity_note;
        out["T2d"] = d;
    } else {
        const auto& econ = economy_of(inst);
        auto audit = econ.audit_hypotheses(inst.config);
        Json a = Json::array(), bj = Json::array(), c = Json::array(), dj = Json::array(),
             e = Json::array(), f = Json::array();
        for (int i = 0; i < econ.num_players(); ++i) {
            const std::string& name = econ.player(i).name;
            const auto& pa = audit.players[static_cast<std::size_t>(i)];
            a.push_back(Json{{"player", name}, {"atomicity", pa.atomicity}});
            bj.push_back(Json{{"player", name},
                              {"alpha_nonempty", pa.alpha_nonempty},
                              {"alpha_closed_form", pa.alpha_closed_form}});
            c.push_back(Json{{"player", name}, {"alpha_usc", pa.alpha_usc}});
            dj.push_back(Json{{"player", name},
                              {"pref_nonempty", pa.pref_nonempty},
                              {"pref_usc", pa.pref_usc},
                              {"pref_closed_form", pa.pref_closed_form}});
            e.push_back(Json{{"player", name},
                             {"irreflexivity_violations", pa.irreflexivity_violations}});
            f.push_back(Json{{"player", name},
                             {"ui_size", pa.ui_size},
                             {"ui_open_violations", pa.ui_open_violations}});
        }
        out["T3a"] = a;
        out["T3b"] = bj;
        out["T3c"] = c;
        out["T3d"] = dj;
        out["T3e"] = e;
        out["T3f"] = f;
        out["theorem4_mode"] = audit.theorem4_mode;
    }
    return out;
}

Json cmd_purify(const pieq::io::Instance& inst, const Options& opt) {
    if (opt.player.empty()) throw pieq::io::SchemaError("purify needs --player");
    if (opt.target.empty()) throw pieq::io::SchemaError("purify needs --target");

    const pieq::Correspondence* constraint = nullptr;
    const pieq::FiniteProbSpace* space = nullptr;
    std::vector<std::string> actions;
    std::vector<std::vector<int>> cells;
    std::vector<std::string> cell_names;
    if (inst.economy) {
        for (int i = 0; i < inst.economy->num_players(); ++i)
            if (inst.economy->player(i).name == opt.player) {
                const auto& pl = inst.economy->player(i);
                constraint = &pl.constraint;
                space = &inst.economy->type_space(i);
                actions = pl.actions;
                cells = pl.type_cells;
                cell_names = pl.cell_names;
            }
    } else {
        for (int i = 0; i < inst.game->num_players(); ++i)
            if (inst.game->player(i).name == opt.player) {
                const auto& pl = inst.game->player(i);
                constraint = &pl.constraint;
                space = &inst.game->type_space(i);
                actions = pl.actions;
                cells = pl.type_cells;
                cell_names = pl.cell_names;
            }
    }
    if (!constraint)
        throw pieq::io::SemanticError("purify: unknown player '" + opt.player + "'");

    std::vector<double> mass = parse_double_list(opt.target);
    if (mass.size() != actions.size())
        throw pieq::io::SemanticError("purify: target length must match the action count");
    pieq::Distribution target(actions, mass);

    pieq::PurifyResult res;
    try {
        res = pieq::purify(*constraint, *space, target, inst.config.tol);
    } catch (const std::invalid_argument& e) {
        throw pieq::io::SemanticError(e.what());
    }
    Json selection = Json::object();
    for (std::size_t c = 0; c < cells.size(); ++c)
        selection[cell_names[c]] =
            actions[static_cast<std::size_t>(res.selection.choice[static_cast<std::size_t>(cells[c].front())])];
    double bound = space->max_atom_weight() / 2.0 * static_cast<double>(actions.size());
    return Json{{"selection", selection},
                {"error", res.error},
                {"bound", bound},
                {"within_bound", res.error <= bound + pieq::kWeightTol}};
}

// Invariant suites run against the loaded instance itself.
Json cmd_props(const pieq::io::Instance& inst) {
    Json checks = Json::array();
    int passed = 0, failed = 0;
    auto record = [&](const std::string& name, bool ok) {
        checks.push_back(Json{{"name", name}, {"ok", ok}});
        (ok ? passed : failed)++;
    };

    auto per_player = [&](const std::string& name, const pieq::Correspondence& d,
                          const pieq::FiniteProbSpace& space) {
        record(name + ".constraint_measurable", d.is_measurable());
        bool nonempty = d.all_values_nonempty();
        std::int64_t count = pieq::selection_count(d, space);
        record(name + ".selections_exist_iff_nonempty", nonempty == (count > 0));
        // Pushforward of each selection preserves total mass.
        bool mass_ok = true;
        pieq::for_each_selection(d, space, [&](const pieq::Selection& g) {
            auto push = pieq::selection_pushforward(space, g, d);
            double total = 0.0;
            for (double m : push.mass()) {
                mass_ok = mass_ok && m >= -pieq::kMassTol;
                total += m;
            }
            mass_ok = mass_ok && std::abs(total - 1.0) <= pieq::kWeightTol;
            return true;
        });
        record(name + ".pushforward_mass", mass_ok);
        // Inverse duality: F^-(A) = domain \ F^+(complement A) for every
        // subset A whenever F is nonempty-valued.
        bool duality_ok = true;
        int m = d.codomain_size();
        if (nonempty && m <= 12) {
            for (int bits = 0; bits < (1 << m); ++bits) {
                std::vector<int> A;
                for (int y = 0; y < m; ++y)
                    if (bits & (1 << y)) A.push_back(y);
                auto lower = d.lower_inverse(A);
                auto upper_comp = d.upper_inverse(pieq::set_complement(m, A));
                duality_ok = duality_ok &&
                             lower == pieq::set_complement(d.domain_size(), upper_comp);
            }
        }
        record(name + ".inverse_duality", duality_ok);
    };

    if (inst.economy) {
        const auto& econ = *inst.economy;
        double total = 0.0;
        for (double w : econ.joint().weights()) total += w;
        record("mu.total_mass", std::abs(total - 1.0) <= pieq::kWeightTol);
        bool dsl_ok = true;
        for (int i = 0; i < econ.num_players(); ++i) {
            const auto& pl = econ.player(i);
            per_player(pl.name, pl.constraint, econ.type_space(i));
            auto round_trip = [&](const pieq::CorrespondenceSpec& spec) {
                for (std::size_t a = 0; a < spec.per_action.size(); ++a) {
                    auto reparsed = pieq::dsl::parse(pieq::dsl::print_canonical(spec.per_action[a]));
                    dsl_ok = dsl_ok && pieq::dsl::structurally_equal(reparsed, spec.per_action[a]);
                }
            };
            round_trip(pl.alpha);
            round_trip(pl.pref);
            if (pl.selector) round_trip(*pl.selector);
        }
        record("dsl.round_trip", dsl_ok);
    } else {
        const auto& game = *inst.game;
        double total = 0.0;
        for (double w : game.joint().weights()) total += w;
        record("mu.total_mass", std::abs(total - 1.0) <= pieq::kWeightTol);
        for (int i = 0; i < game.num_players(); ++i)
            per_player(game.player(i).name, game.player(i).constraint, game.type_space(i));
    }
    return Json{{"passed", passed}, {"failed", failed}, {"checks", checks}};
}

Json cmd_refine_study(const Options& opt, const pieq::io::Instance& base) {
    Json rows = Json::array();
    for (int k : parse_int_list(opt.ks)) {
        if (k < 1) throw pieq::io::SemanticError("refine-study: levels must be >= 1");
        pieq::io::Instance inst = pieq::io::load(opt.instance_path, k);
        inst.config = base.config;
        inst.config.refine = 1;
        Json players = Json::array();
        bool found = false;
        if (inst.economy) {
            const auto& econ = *inst.economy;
            for (int i = 0; i < econ.num_players(); ++i) {
                auto dd = econ.build_DDi(i, inst.config.budget, inst.config.seed);
                if (!dd.exact)
                    throw pieq::io::BudgetError(
                        "refine-study: distribution set enumeration exceeded the budget");
                players.push_back(Json{{"player", econ.player(i).name},
                                       {"atomicity", econ.type_space(i).max_atom_weight()},
                                       {"gap", pieq::convexification_gap(dd)}});
            }
            found = econ.find_equilibrium(inst.config).certificate.has_value();
        } else {
            const auto& game = *inst.game;
            for (int i = 0; i < game.num_players(); ++i) {
                auto dd = pieq::distribution_set(game.player(i).constraint, game.type_space(i),
                                                 inst.config.budget, inst.config.seed);
                if (!dd.exact)
                    throw pieq::io::BudgetError(
                        "refine-study: distribution set enumeration exceeded the budget");
                players.push_back(Json{{"player", game.player(i).name},
                                       {"atomicity", game.type_space(i).max_atom_weight()},
                                       {"gap", pieq::convexification_gap(dd)}});
            }
            found = game.find_nash(inst.config).profile.has_value();
        }
        rows.push_back(Json{{"k", k}, {"players", players}, {"equilibrium_found", found}});
    }
    return Json{{"rows", rows}};
}

int run(const Options& opt) {
    auto start = std::chrono::steady_clock::now();
    pieq::io::Instance inst = load_with_overrides(opt);

    Json result;
    if (opt.command == "solve")
        result = cmd_solve(inst);
    else if (opt.command == "solve-game")
        result = cmd_solve_game(inst);
    else if (opt.command == "verify")
        result = cmd_verify(inst, opt);
    else if (opt.command == "purify")
        result = cmd_purify(inst, opt);
    else if (opt.command == "props")
        result = cmd_props(inst);
    else if (opt.command == "refine-study")
        result = cmd_refine_study(opt, inst);

    Json report;
    report["command"] = opt.command;
    report["instance_hash"] = pieq::io::instance_hash(inst);
    report["config"] = pieq::io::config_json(inst.config);
    if (opt.command == "audit")
        report["audit"] = cmd_audit(inst);
    else
        report["result"] = result;
    // Timing is emitted only on request so default reports are
    // byte-identical across runs.
    if (opt.timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        report["timing_ms"] = ms;
    } else {
        report["timing_ms"] = nullptr;
    }

    std::string bytes = report.dump(2) + "\n";
    if (opt.out_path.empty()) {
        std::cout << bytes;
    } else {
        std::ofstream out(opt.out_path);
        if (!out) throw pieq::io::SchemaError("cannot open output file: " + opt.out_path);
        out << bytes;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite private-information equilibrium toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--instance", opt.instance_path, "instance JSON file")->required();
        sub->add_option("--out", opt.out_path, "report output path (default stdout)");
        sub->add_option("--seed", opt.seed, "override solver seed");
        sub->add_option("--budget", opt.budget, "override enumeration budget");
        sub->add_option("--refine", opt.refine, "override type-space refinement factor");
        sub->add_flag("--theorem4", opt.theorem4, "use the selector correspondence off U_i");
        sub->add_flag("--timing", opt.timing, "include wall-clock timing in the report");
        return sub;
    };

    add_common(app.add_subcommand("solve", "search for an equilibrium of an economy"));
    add_common(app.add_subcommand("solve-game", "search for an equilibrium of a game"));
    auto* verify = add_common(app.add_subcommand("verify", "check a supplied profile"));
    verify->add_option("--profile", opt.profile_path, "profile JSON file")->required();
    add_common(app.add_subcommand("audit", "report the hypothesis diagnostics"));
    auto* purify = add_common(app.add_subcommand("purify", "realize a target as a pure profile"));
    purify->add_option("--player", opt.player, "player name")->required();
    purify->add_option("--target", opt.target, "target masses over the action order")->required();
    add_common(app.add_subcommand("props", "run the invariant suites on the instance"));
    auto* study = add_common(app.add_subcommand("refine-study", "refinement sweep"));
    study->add_option("--ks", opt.ks, "comma-separated refinement levels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    opt.command = app.get_subcommands().front()->get_name();

    try {
        return run(opt);
    } catch (const pieq::io::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 1;
    } catch (const pieq::io::SemanticError& e) {
        std::cerr << "semantic error: " << e.what() << "\n";
        return 2;
    } catch (const pieq::dsl::ParseError& e) {
        std::cerr << "semantic error: " << e.what() << "\n";
        return 2;
    } catch (const pieq::io::BudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "semantic error: " << e.what() << "\n";
        return 2;
    }
}
