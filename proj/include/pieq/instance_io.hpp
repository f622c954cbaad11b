#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pieq/config.hpp"
#include "pieq/economy.hpp"
#include "pieq/game.hpp"

namespace pieq::io {

using Json = nlohmann::ordered_json;

/// Malformed document structure (missing keys, wrong types). CLI exit 1.
struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Well-formed document with inconsistent content (undeclared ids, DSL
/// type errors, invalid measures). CLI exit 2.
struct SemanticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Enumeration exceeded the configured budget with no fallback. CLI exit 3.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Instance {
    std::string kind;  // "game" | "economy"
    SolveConfig config;
    std::shared_ptr<PrivateInfoGame> game;  // set when kind == "game"
    std::shared_ptr<Economy> economy;       // set when kind == "economy"
    Json normalized;                        // canonical document form
};

/// Loads and validates an instance file. refine_override > 0 replaces the
/// solver.refine factor; the refinement is applied to the type spaces at
/// load time.
Instance load(const std::string& path, int refine_override = 0);
Instance load_document(const Json& doc, int refine_override = 0);

/// Canonical re-serialization; load(save(i)) equals i.
std::string save(const Instance& instance);

/// FNV-1a 64 hash of the normalized document bytes, hex encoded.
std::string instance_hash(const Instance& instance);

/// Profile document: {"profile": {player: {cell: action}}}.
StrategyProfile load_profile(const std::string& path, const Instance& instance);

Json profile_json(const Instance& instance, const StrategyProfile& profile);
Json certificate_json(const Economy& economy, const EquilibriumCertificate& cert);
Json config_json(const SolveConfig& config);

}  // namespace pieq::io
