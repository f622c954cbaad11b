#include "pieq/instance_io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>

namespace pieq::io {

namespace {

const Json& require(const Json& doc, const std::string& key, const char* context) {
    if (!doc.is_object())
        throw SchemaError(std::string(context) + ": expected an object");
    auto it = doc.find(key);
    if (it == doc.end())
        throw SchemaError(std::string(context) + ": missing key '" + key + "'");
    return *it;
}

std::vector<std::string> string_list(const Json& j, const char* context) {
    if (!j.is_array()) throw SchemaError(std::string(context) + ": expected an array");
    std::vector<std::string> out;
    for (const auto& e : j) {
        if (!e.is_string()) throw SchemaError(std::string(context) + ": expected strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

int index_of(const std::vector<std::string>& list, const std::string& name,
             const char* context) {
    auto it = std::find(list.begin(), list.end(), name);
    if (it == list.end())
        throw SemanticError(std::string(context) + ": undeclared identifier '" + name + "'");
    return static_cast<int>(it - list.begin());
}

struct RawPlayer {
    std::string name;
    std::vector<std::string> type_atoms;
    std::vector<std::string> cell_names;
    std::vector<std::vector<int>> cells;      // atom indices per cell
    std::vector<std::string> shock_atoms;     // games only
    std::vector<std::string> actions;
    std::vector<std::vector<int>> d_by_cell;  // allowed action indices per cell
    // economy specs (canonical text after parsing)
    std::vector<std::string> alpha_text, pref_text, selector_text;
    bool has_selector = false;
    std::vector<double> payoff;  // games, flat over (a_1..a_n, x_i)
};

struct RawInstance {
    std::string kind;
    std::vector<RawPlayer> players;
    std::map<std::vector<int>, double> mu;  // factor components -> weight
    SolveConfig config;
};

SolveConfig parse_solver(const Json& doc) {
    SolveConfig c;
    if (!doc.contains("solver")) return c;
    const Json& s = doc["solver"];
    if (!s.is_object()) throw SchemaError("solver: expected an object");
    auto num = [&](const char* key, auto def) {
        using T = decltype(def);
        if (!s.contains(key)) return def;
        if (!s[key].is_number()) throw SchemaError(std::string("solver.") + key + ": expected a number");
        return s[key].get<T>();
    };
    c.budget = num("budget", c.budget);
    c.tol = num("tol", c.tol);
    c.eps = num("eps", c.eps);
    c.max_iters = num("max_iters", c.max_iters);
    c.seed = num("seed", c.seed);
    c.refine = num("refine", c.refine);
    c.mesh = num("mesh", c.mesh);
    if (s.contains("theorem4")) {
        if (!s["theorem4"].is_boolean()) throw SchemaError("solver.theorem4: expected a boolean");
        c.theorem4 = s["theorem4"].get<bool>();
    }
    return c;
}

dsl::ExprPtr parse_predicate(const std::string& text, const dsl::Declarations& decl,
                             const std::string& context) {
    try {
        auto e = dsl::parse(text);
        dsl::typecheck(e, decl);
        return e;
    } catch (const dsl::ParseError& err) {
        throw SemanticError(context + ": " + err.what());
    }
}

RawInstance parse_raw(const Json& doc) {
    RawInstance raw;
    const Json& kind = require(doc, "kind", "instance");
    if (!kind.is_string() ||
        (kind.get<std::string>() != "game" && kind.get<std::string>() != "economy"))
        throw SchemaError("kind: expected \"game\" or \"economy\"");
    raw.kind = kind.get<std::string>();
    raw.config = parse_solver(doc);

    const Json& players = require(doc, "players", "instance");
    if (!players.is_array() || players.empty())
        throw SchemaError("players: expected a nonempty array");

    const int n = static_cast<int>(players.size());
    for (int i = 0; i < n; ++i) {
        const Json& pj = players[static_cast<std::size_t>(i)];
        std::string ctx = "players[" + std::to_string(i) + "]";
        RawPlayer pl;
        pl.name = pj.contains("name") ? require(pj, "name", ctx.c_str()).get<std::string>()
                                      : "p" + std::to_string(i + 1);
        const Json& types = require(pj, "types", ctx.c_str());
        pl.type_atoms = string_list(require(types, "atoms", (ctx + ".types").c_str()),
                                    (ctx + ".types.atoms").c_str());
        if (pl.type_atoms.empty()) throw SchemaError(ctx + ".types.atoms: empty");
        if (types.contains("cells")) {
            const Json& cells = types["cells"];
            if (!cells.is_object()) throw SchemaError(ctx + ".types.cells: expected an object");
            for (auto it = cells.begin(); it != cells.end(); ++it) {
                pl.cell_names.push_back(it.key());
                std::vector<int> cell;
                for (const auto& atom :
                     string_list(it.value(), (ctx + ".types.cells").c_str()))
                    cell.push_back(index_of(pl.type_atoms, atom, (ctx + ".types.cells").c_str()));
                pl.cells.push_back(std::move(cell));
            }
        } else {
            for (std::size_t t = 0; t < pl.type_atoms.size(); ++t) {
                pl.cell_names.push_back(pl.type_atoms[t]);
                pl.cells.push_back({static_cast<int>(t)});
            }
        }
        pl.actions = string_list(require(pj, "actions", ctx.c_str()), (ctx + ".actions").c_str());
        if (pl.actions.empty()) throw SchemaError(ctx + ".actions: empty");

        const Json& d = require(pj, "D", ctx.c_str());
        if (!d.is_object()) throw SchemaError(ctx + ".D: expected an object");
        pl.d_by_cell.resize(pl.cells.size());
        for (std::size_t c = 0; c < pl.cells.size(); ++c) {
            const std::string& cn = pl.cell_names[c];
            if (!d.contains(cn))
                throw SemanticError(ctx + ".D: missing cell '" + cn + "'");
            for (const auto& a : string_list(d[cn], (ctx + ".D").c_str()))
                pl.d_by_cell[c].push_back(index_of(pl.actions, a, (ctx + ".D").c_str()));
            if (pl.d_by_cell[c].empty())
                throw SemanticError(ctx + ".D: empty value for cell '" + cn + "'");
            std::sort(pl.d_by_cell[c].begin(), pl.d_by_cell[c].end());
        }

        if (raw.kind == "game") {
            if (pj.contains("shocks"))
                pl.shock_atoms = string_list(require(pj["shocks"], "atoms",
                                                     (ctx + ".shocks").c_str()),
                                             (ctx + ".shocks.atoms").c_str());
            if (pl.shock_atoms.empty()) pl.shock_atoms = {"x"};
        }
        raw.players.push_back(std::move(pl));
    }

    // DSL specs need all players' declarations, so a second pass.
    if (raw.kind == "economy") {
        dsl::Declarations base;
        base.num_players = n;
        for (const auto& pl : raw.players) base.actions.push_back(pl.actions);
        for (int i = 0; i < n; ++i) {
            RawPlayer& pl = raw.players[static_cast<std::size_t>(i)];
            const Json& pj = players[static_cast<std::size_t>(i)];
            std::string ctx = "players[" + std::to_string(i) + "]";
            dsl::Declarations decl = base;
            decl.cell_ids = pl.cell_names;
            auto parse_spec = [&](const char* key, std::vector<std::string>& out,
                                  bool required) {
                if (!pj.contains(key)) {
                    if (required) throw SchemaError(ctx + ": missing key '" + key + "'");
                    return false;
                }
                const Json& spec = pj[key];
                if (!spec.is_object())
                    throw SchemaError(ctx + "." + key + ": expected an object");
                for (const auto& a : pl.actions) {
                    if (!spec.contains(a))
                        throw SemanticError(ctx + "." + key + ": missing predicate for action '" +
                                            a + "'");
                    if (!spec[a].is_string())
                        throw SchemaError(ctx + "." + key + ": predicate must be a string");
                    auto e = parse_predicate(spec[a].get<std::string>(), decl,
                                             ctx + "." + key + "." + a);
                    out.push_back(dsl::print_canonical(e));
                }
                return true;
            };
            parse_spec("alpha", pl.alpha_text, true);
            parse_spec("P", pl.pref_text, true);
            pl.has_selector = parse_spec("G", pl.selector_text, false);
        }
    } else {
        for (int i = 0; i < n; ++i) {
            RawPlayer& pl = raw.players[static_cast<std::size_t>(i)];
            const Json& pj = players[static_cast<std::size_t>(i)];
            std::string ctx = "players[" + std::to_string(i) + "]";
            std::int64_t table = static_cast<std::int64_t>(pl.shock_atoms.size());
            for (const auto& q : raw.players) table *= static_cast<std::int64_t>(q.actions.size());
            pl.payoff.assign(static_cast<std::size_t>(table),
                             std::numeric_limits<double>::quiet_NaN());
            const Json& payoff = require(pj, "payoff", ctx.c_str());
            if (!payoff.is_array()) throw SchemaError(ctx + ".payoff: expected an array");
            for (const auto& entry : payoff) {
                auto acts = string_list(require(entry, "actions", (ctx + ".payoff").c_str()),
                                        (ctx + ".payoff.actions").c_str());
                if (static_cast<int>(acts.size()) != n)
                    throw SemanticError(ctx + ".payoff: action tuple arity mismatch");
                std::int64_t idx = 0;
                for (int j = 0; j < n; ++j)
                    idx = idx * static_cast<std::int64_t>(
                                    raw.players[static_cast<std::size_t>(j)].actions.size()) +
                          index_of(raw.players[static_cast<std::size_t>(j)].actions,
                                   acts[static_cast<std::size_t>(j)], (ctx + ".payoff").c_str());
                int shock = 0;
                if (entry.contains("shock"))
                    shock = index_of(pl.shock_atoms, entry["shock"].get<std::string>(),
                                     (ctx + ".payoff.shock").c_str());
                idx = idx * static_cast<std::int64_t>(pl.shock_atoms.size()) + shock;
                const Json& value = require(entry, "value", (ctx + ".payoff").c_str());
                if (!value.is_number()) throw SchemaError(ctx + ".payoff.value: expected a number");
                pl.payoff[static_cast<std::size_t>(idx)] = value.get<double>();
            }
            for (double v : pl.payoff)
                if (std::isnan(v))
                    throw SemanticError(ctx + ".payoff: table is not total");
        }
    }

    // The joint measure. Factor order: Z_1..Z_n for economies,
    // Z_1, X_1, ..., Z_n, X_n for games.
    std::vector<const std::vector<std::string>*> factors;
    for (const auto& pl : raw.players) {
        factors.push_back(&pl.type_atoms);
        if (raw.kind == "game") factors.push_back(&pl.shock_atoms);
    }
    const Json& mu = require(doc, "mu", "instance");
    if (!mu.is_array()) throw SchemaError("mu: expected an array");
    for (const auto& entry : mu) {
        auto atoms = string_list(require(entry, "atoms", "mu"), "mu.atoms");
        if (atoms.size() != factors.size())
            throw SemanticError("mu: atom tuple arity mismatch");
        std::vector<int> comps;
        for (std::size_t f = 0; f < factors.size(); ++f)
            comps.push_back(index_of(*factors[f], atoms[f], "mu"));
        const Json& w = require(entry, "weight", "mu");
        if (!w.is_number()) throw SchemaError("mu.weight: expected a number");
        if (!raw.mu.emplace(std::move(comps), w.get<double>()).second)
            throw SemanticError("mu: duplicate atom tuple");
    }
    return raw;
}

// Rewrites zcell references after a refinement split each cell id c into
// the sub-cell ids listed in `expansion[c]`.
dsl::ExprPtr expand_cells(const dsl::ExprPtr& e,
                          const std::map<std::string, std::vector<std::string>>& expansion) {
    auto node = std::make_shared<dsl::Expr>(*e);
    if (node->kind == dsl::Kind::ZcellIn) {
        std::vector<std::string> ids;
        for (const auto& id : node->cell_ids) {
            const auto& subs = expansion.at(id);
            ids.insert(ids.end(), subs.begin(), subs.end());
        }
        node->cell_ids = std::move(ids);
    }
    for (auto& arg : node->args) arg = expand_cells(arg, expansion);
    return node;
}

void apply_refine(RawInstance& raw, int k) {
    if (k <= 1) return;
    const bool game = raw.kind == "game";
    const int n = static_cast<int>(raw.players.size());
    for (auto& pl : raw.players) {
        std::vector<std::string> atoms;
        for (const auto& a : pl.type_atoms)
            for (int j = 0; j < k; ++j) atoms.push_back(a + "_" + std::to_string(j));
        // Each sigma cell splits into k sub-cells so the refinement also
        // refines measurability, not just the weights.
        std::vector<std::string> cell_names;
        std::vector<std::vector<int>> cells;
        std::vector<std::vector<int>> d_by_cell;
        std::map<std::string, std::vector<std::string>> expansion;
        for (std::size_t c = 0; c < pl.cells.size(); ++c) {
            std::vector<std::string> subs;
            for (int j = 0; j < k; ++j) {
                std::string sub_name = pl.cell_names[c] + "_" + std::to_string(j);
                subs.push_back(sub_name);
                cell_names.push_back(sub_name);
                std::vector<int> sub_cell;
                for (int atom : pl.cells[c]) sub_cell.push_back(atom * k + j);
                cells.push_back(std::move(sub_cell));
                d_by_cell.push_back(pl.d_by_cell[c]);
            }
            expansion[pl.cell_names[c]] = std::move(subs);
        }
        {
            auto sorted = cell_names;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw SemanticError("refinement produced a duplicate cell name");
        }
        pl.type_atoms = std::move(atoms);
        pl.cell_names = std::move(cell_names);
        pl.cells = std::move(cells);
        pl.d_by_cell = std::move(d_by_cell);
        auto rewrite = [&](std::vector<std::string>& texts) {
            for (auto& t : texts)
                t = dsl::print_canonical(expand_cells(dsl::parse(t), expansion));
        };
        rewrite(pl.alpha_text);
        rewrite(pl.pref_text);
        rewrite(pl.selector_text);
    }
    std::map<std::vector<int>, double> mu;
    std::vector<int> type_positions;  // positions of type factors in the tuple
    for (int i = 0; i < n; ++i) type_positions.push_back(game ? 2 * i : i);
    const double split = std::pow(static_cast<double>(k), static_cast<double>(n));
    for (const auto& [comps, weight] : raw.mu) {
        std::vector<int> sub(static_cast<std::size_t>(n), 0);
        while (true) {
            std::vector<int> t = comps;
            for (int i = 0; i < n; ++i)
                t[static_cast<std::size_t>(type_positions[static_cast<std::size_t>(i)])] =
                    comps[static_cast<std::size_t>(type_positions[static_cast<std::size_t>(i)])] *
                        k +
                    sub[static_cast<std::size_t>(i)];
            mu[t] += weight / split;
            int c = n;
            bool done = false;
            while (c > 0) {
                --c;
                if (++sub[static_cast<std::size_t>(c)] < k) break;
                sub[static_cast<std::size_t>(c)] = 0;
                if (c == 0) done = true;
            }
            if (done) break;
        }
    }
    raw.mu = std::move(mu);
    raw.config.refine = 1;
}

Json number_json(double v) { return Json(v); }

Json build_normalized(const RawInstance& raw) {
    Json doc;
    doc["kind"] = raw.kind;
    doc["players"] = Json::array();
    for (const auto& pl : raw.players) {
        Json pj;
        pj["name"] = pl.name;
        Json cells = Json::object();
        for (std::size_t c = 0; c < pl.cells.size(); ++c) {
            Json atoms = Json::array();
            for (int atom : pl.cells[c]) atoms.push_back(pl.type_atoms[static_cast<std::size_t>(atom)]);
            cells[pl.cell_names[c]] = atoms;
        }
        pj["types"] = Json{{"atoms", pl.type_atoms}, {"cells", cells}};
        if (raw.kind == "game") pj["shocks"] = Json{{"atoms", pl.shock_atoms}};
        pj["actions"] = pl.actions;
        Json d = Json::object();
        for (std::size_t c = 0; c < pl.cells.size(); ++c) {
            Json acts = Json::array();
            for (int a : pl.d_by_cell[c]) acts.push_back(pl.actions[static_cast<std::size_t>(a)]);
            d[pl.cell_names[c]] = acts;
        }
        pj["D"] = d;
        if (raw.kind == "economy") {
            auto spec = [&](const std::vector<std::string>& texts) {
                Json s = Json::object();
                for (std::size_t a = 0; a < pl.actions.size(); ++a) s[pl.actions[a]] = texts[a];
                return s;
            };
            pj["alpha"] = spec(pl.alpha_text);
            pj["P"] = spec(pl.pref_text);
            if (pl.has_selector) pj["G"] = spec(pl.selector_text);
        } else {
            Json payoff = Json::array();
            const int n = static_cast<int>(raw.players.size());
            std::vector<int> tuple(static_cast<std::size_t>(n), 0);
            std::size_t idx = 0;
            bool done = false;
            while (!done) {
                for (std::size_t x = 0; x < pl.shock_atoms.size(); ++x) {
                    Json entry;
                    Json acts = Json::array();
                    for (int j = 0; j < n; ++j)
                        acts.push_back(raw.players[static_cast<std::size_t>(j)]
                                           .actions[static_cast<std::size_t>(
                                               tuple[static_cast<std::size_t>(j)])]);
                    entry["actions"] = acts;
                    entry["shock"] = pl.shock_atoms[x];
                    entry["value"] = number_json(pl.payoff[idx++]);
                    payoff.push_back(entry);
                }
                int c = n;
                while (c > 0) {
                    --c;
                    if (++tuple[static_cast<std::size_t>(c)] <
                        static_cast<int>(raw.players[static_cast<std::size_t>(c)].actions.size()))
                        break;
                    tuple[static_cast<std::size_t>(c)] = 0;
                    if (c == 0) done = true;
                }
            }
            pj["payoff"] = payoff;
        }
        doc["players"].push_back(pj);
    }
    Json mu = Json::array();
    for (const auto& [comps, weight] : raw.mu) {
        if (weight == 0.0) continue;
        Json entry;
        Json atoms = Json::array();
        std::size_t f = 0;
        for (std::size_t i = 0; i < raw.players.size(); ++i) {
            const auto& pl = raw.players[i];
            atoms.push_back(pl.type_atoms[static_cast<std::size_t>(comps[f++])]);
            if (raw.kind == "game")
                atoms.push_back(pl.shock_atoms[static_cast<std::size_t>(comps[f++])]);
        }
        entry["atoms"] = atoms;
        entry["weight"] = number_json(weight);
        mu.push_back(entry);
    }
    doc["mu"] = mu;
    doc["solver"] = config_json(raw.config);
    return doc;
}

Instance build_instance(RawInstance raw) {
    Instance instance;
    instance.kind = raw.kind;
    instance.config = raw.config;
    const int n = static_cast<int>(raw.players.size());
    const bool game = raw.kind == "game";

    std::vector<std::vector<std::string>> factors;
    for (const auto& pl : raw.players) {
        factors.push_back(pl.type_atoms);
        if (game) factors.push_back(pl.shock_atoms);
    }
    std::int64_t total = 1;
    for (const auto& f : factors) total *= static_cast<std::int64_t>(f.size());
    std::vector<double> weights(static_cast<std::size_t>(total), 0.0);
    std::vector<std::int64_t> strides(factors.size(), 1);
    for (int i = static_cast<int>(factors.size()) - 2; i >= 0; --i)
        strides[static_cast<std::size_t>(i)] =
            strides[static_cast<std::size_t>(i) + 1] *
            static_cast<std::int64_t>(factors[static_cast<std::size_t>(i) + 1].size());
    for (const auto& [comps, weight] : raw.mu) {
        std::int64_t r = 0;
        for (std::size_t f = 0; f < factors.size(); ++f) r += strides[f] * comps[f];
        weights[static_cast<std::size_t>(r)] = weight;
    }

    auto make_constraint = [](const RawPlayer& pl) {
        std::vector<std::vector<int>> values(pl.type_atoms.size());
        for (std::size_t c = 0; c < pl.cells.size(); ++c)
            for (int atom : pl.cells[c]) values[static_cast<std::size_t>(atom)] = pl.d_by_cell[c];
        return Correspondence(pl.type_atoms, pl.actions, std::move(values), std::nullopt,
                              pl.cells);
    };

    try {
        ProductSpace joint(factors, std::move(weights));
        if (game) {
            std::vector<GamePlayer> players;
            for (const auto& pl : raw.players) {
                GamePlayer gp{pl.name,    pl.type_atoms, pl.shock_atoms, pl.actions,
                              pl.cells,   pl.cell_names, make_constraint(pl), pl.payoff};
                players.push_back(std::move(gp));
            }
            instance.game = std::make_shared<PrivateInfoGame>(std::move(players), std::move(joint));
        } else {
            dsl::Declarations base;
            base.num_players = n;
            for (const auto& pl : raw.players) base.actions.push_back(pl.actions);
            std::vector<EconomyPlayer> players;
            for (const auto& pl : raw.players) {
                auto spec_of = [&](const std::vector<std::string>& texts) {
                    CorrespondenceSpec spec;
                    spec.texts = texts;
                    spec.closed_form = true;
                    for (const auto& t : texts) {
                        auto e = dsl::parse(t);
                        spec.closed_form = spec.closed_form && dsl::is_closed_form(e);
                        spec.per_action.push_back(std::move(e));
                    }
                    return spec;
                };
                EconomyPlayer ep{pl.name,
                                 pl.type_atoms,
                                 pl.actions,
                                 pl.cells,
                                 pl.cell_names,
                                 make_constraint(pl),
                                 spec_of(pl.alpha_text),
                                 spec_of(pl.pref_text),
                                 pl.has_selector
                                     ? std::optional<CorrespondenceSpec>(spec_of(pl.selector_text))
                                     : std::nullopt};
                players.push_back(std::move(ep));
            }
            instance.economy = std::make_shared<Economy>(std::move(players), std::move(joint));
        }
    } catch (const std::invalid_argument& e) {
        throw SemanticError(e.what());
    }
    instance.normalized = build_normalized(raw);
    return instance;
}

}  // namespace

Instance load_document(const Json& doc, int refine_override) {
    RawInstance raw = parse_raw(doc);
    int k = refine_override > 0 ? refine_override : raw.config.refine;
    apply_refine(raw, k);
    raw.config.refine = 1;
    return build_instance(std::move(raw));
}

Instance load(const std::string& path, int refine_override) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open instance file: " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("JSON parse error: ") + e.what());
    }
    return load_document(doc, refine_override);
}

std::string save(const Instance& instance) { return instance.normalized.dump(2) + "\n"; }

std::string instance_hash(const Instance& instance) {
    const std::string bytes = instance.normalized.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream oss;
    oss << std::hex << h;
    return "fnv1a64-" + oss.str();
}

namespace {

struct ProfileShape {
    std::vector<std::string> names;
    std::vector<const std::vector<std::string>*> actions;
    std::vector<const std::vector<std::string>*> cell_names;
    std::vector<const std::vector<std::vector<int>>*> cells;
    std::vector<const FiniteProbSpace*> spaces;
    std::vector<const Correspondence*> constraints;
};

ProfileShape shape_of(const Instance& instance) {
    ProfileShape s;
    if (instance.kind == "game") {
        const auto& g = *instance.game;
        for (int i = 0; i < g.num_players(); ++i) {
            const auto& pl = g.player(i);
            s.names.push_back(pl.name);
            s.actions.push_back(&pl.actions);
            s.cell_names.push_back(&pl.cell_names);
            s.cells.push_back(&pl.type_cells);
            s.spaces.push_back(&g.type_space(i));
            s.constraints.push_back(&pl.constraint);
        }
    } else {
        const auto& e = *instance.economy;
        for (int i = 0; i < e.num_players(); ++i) {
            const auto& pl = e.player(i);
            s.names.push_back(pl.name);
            s.actions.push_back(&pl.actions);
            s.cell_names.push_back(&pl.cell_names);
            s.cells.push_back(&pl.type_cells);
            s.spaces.push_back(&e.type_space(i));
            s.constraints.push_back(&pl.constraint);
        }
    }
    return s;
}

}  // namespace

StrategyProfile load_profile(const std::string& path, const Instance& instance) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open profile file: " + path);
    Json doc;
    try {
        in >> doc;
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("JSON parse error: ") + e.what());
    }
    const Json& prof = require(doc, "profile", "profile file");
    ProfileShape s = shape_of(instance);
    StrategyProfile profile;
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        if (!prof.contains(s.names[i]))
            throw SemanticError("profile: missing player '" + s.names[i] + "'");
        const Json& pj = prof[s.names[i]];
        if (!pj.is_object()) throw SchemaError("profile: expected cell->action object");
        Selection g;
        g.choice.assign(static_cast<std::size_t>(s.spaces[i]->size()), -1);
        for (std::size_t c = 0; c < s.cell_names[i]->size(); ++c) {
            const std::string& cn = (*s.cell_names[i])[c];
            int a;
            if (pj.contains(cn)) {
                a = index_of(*s.actions[i], pj[cn].get<std::string>(), "profile");
            } else if (s.spaces[i]->cell_weight(static_cast<int>(c)) <= 0) {
                a = (*s.constraints[i]).value((*s.cells[i])[c].front()).front();
            } else {
                throw SemanticError("profile: missing cell '" + cn + "' for player '" +
                                    s.names[i] + "'");
            }
            for (int atom : (*s.cells[i])[c]) g.choice[static_cast<std::size_t>(atom)] = a;
        }
        profile.strategies.push_back(std::move(g));
    }
    return profile;
}

Json profile_json(const Instance& instance, const StrategyProfile& profile) {
    ProfileShape s = shape_of(instance);
    Json out = Json::object();
    for (std::size_t i = 0; i < s.names.size(); ++i) {
        Json pj = Json::object();
        for (std::size_t c = 0; c < s.cell_names[i]->size(); ++c) {
            int a = profile.strategies[i].choice[static_cast<std::size_t>((*s.cells[i])[c].front())];
            pj[(*s.cell_names[i])[c]] = (*s.actions[i])[static_cast<std::size_t>(a)];
        }
        out[s.names[i]] = pj;
    }
    return out;
}

Json certificate_json(const Economy& economy, const EquilibriumCertificate& cert) {
    Json out;
    Json prof = Json::object();
    for (int i = 0; i < economy.num_players(); ++i) {
        const auto& pl = economy.player(i);
        Json pj = Json::object();
        for (std::size_t c = 0; c < pl.cell_names.size(); ++c) {
            int a = cert.profile.strategies[static_cast<std::size_t>(i)]
                        .choice[static_cast<std::size_t>(pl.type_cells[c].front())];
            pj[pl.cell_names[c]] = pl.actions[static_cast<std::size_t>(a)];
        }
        prof[pl.name] = pj;
    }
    out["profile"] = prof;
    Json lambdas = Json::object();
    for (int i = 0; i < economy.num_players(); ++i) {
        const auto& pl = economy.player(i);
        Json lj = Json::object();
        const auto& lam = cert.lambdas[static_cast<std::size_t>(i)];
        for (int a = 0; a < lam.size(); ++a) lj[lam.support()[static_cast<std::size_t>(a)]] = lam.mass(a);
        lambdas[pl.name] = lj;
    }
    out["lambdas"] = lambdas;
    Json checks = Json::array();
    for (const auto& rec : cert.checks) {
        const auto& pl = economy.player(rec.player);
        checks.push_back(Json{{"player", pl.name},
                              {"cell", pl.cell_names[static_cast<std::size_t>(rec.cell)]},
                              {"cond1", rec.cond1},
                              {"cond2", rec.cond2}});
    }
    out["checks"] = checks;
    return out;
}

Json config_json(const SolveConfig& config) {
    return Json{{"budget", config.budget},   {"tol", config.tol},
                {"eps", config.eps},         {"max_iters", config.max_iters},
                {"seed", config.seed},       {"refine", config.refine},
                {"theorem4", config.theorem4}, {"mesh", config.mesh}};
}

}  // namespace pieq::io
