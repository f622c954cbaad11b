#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pieq/measure.hpp"

namespace pieq::dsl {

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
          line(line_),
          column(col_) {}
};

enum class Kind {
    Number,
    Lam,      // lam[player][action]
    True,
    False,
    ZcellIn,  // zcell in {c1, c2}
    Cmp,      // op one of < <= = >= >
    Add,
    Sub,
    Mul,
    Min,
    Max,
    And,
    Or,
    Not,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Kind kind;
    double number = 0.0;
    int player = 0;           // 1-based, Lam only
    std::string action;       // Lam only
    std::string op;           // Cmp only
    std::vector<std::string> cell_ids;  // ZcellIn only
    std::vector<ExprPtr> args;
};

/// Parses the predicate grammar; throws ParseError with position info.
ExprPtr parse(std::string_view text);

/// Fully parenthesized canonical form; parse(print_canonical(e)) is
/// structurally equal to e.
std::string print_canonical(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

struct Declarations {
    int num_players = 0;
    std::vector<std::vector<std::string>> actions;  // per player
    std::vector<std::string> cell_ids;              // valid zcell identifiers
};

/// Checks boolean root, numeric operands under comparisons, and that all
/// referenced players/actions/cells are declared. Throws ParseError.
void typecheck(const ExprPtr& e, const Declarations& decl);

/// Total evaluation; z_cell is the sigma-cell identifier of the type.
bool eval(const ExprPtr& e, std::string_view z_cell, std::span<const Distribution> lambdas);

/// True when the inclusion region is closed in lambda: no strict
/// comparison and no negation anywhere in the tree.
bool is_closed_form(const ExprPtr& e);

}  // namespace pieq::dsl
