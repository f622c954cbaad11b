#include <random>

#include <doctest.h>

#include "pieq/dsl.hpp"

using namespace pieq;
using dsl::Expr;
using dsl::ExprPtr;
using dsl::Kind;

namespace {

std::vector<Distribution> lambda_pair(std::vector<double> m1, std::vector<double> m2) {
    return {Distribution({"a", "b"}, std::move(m1)), Distribution({"a", "b"}, std::move(m2))};
}

}  // namespace

TEST_CASE("parse golden fixtures") {
    auto t = dsl::parse("true");
    CHECK(t->kind == Kind::True);

    auto cmp = dsl::parse("lam[2][b] <= 0.5");
    REQUIRE(cmp->kind == Kind::Cmp);
    CHECK(cmp->op == "<=");
    REQUIRE(cmp->args.size() == 2);
    CHECK(cmp->args[0]->kind == Kind::Lam);
    CHECK(cmp->args[0]->player == 2);
    CHECK(cmp->args[0]->action == "b");
    CHECK(cmp->args[1]->kind == Kind::Number);
    CHECK(cmp->args[1]->number == doctest::Approx(0.5));

    auto conj = dsl::parse("zcell in {c1, c2} and lam[1][a] + lam[1][b] >= 1.0");
    REQUIRE(conj->kind == Kind::And);
    REQUIRE(conj->args.size() == 2);
    CHECK(conj->args[0]->kind == Kind::ZcellIn);
    CHECK(conj->args[0]->cell_ids == std::vector<std::string>{"c1", "c2"});
    CHECK(conj->args[1]->kind == Kind::Cmp);
    CHECK(conj->args[1]->args[0]->kind == Kind::Add);
    // Round-trip through the canonical printer.
    auto again = dsl::parse(dsl::print_canonical(conj));
    CHECK(dsl::structurally_equal(conj, again));
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS((void)dsl::parse("lam[1]["), dsl::ParseError);
    CHECK_THROWS_AS((void)dsl::parse("1.0 + "), dsl::ParseError);
    CHECK_THROWS_AS((void)dsl::parse("zcell in {}"), dsl::ParseError);
    CHECK_THROWS_AS((void)dsl::parse("1.0 / 2.0"), dsl::ParseError);  // no division
    // A numeric root is rejected (boolean required).
    CHECK_THROWS_AS((void)dsl::parse("1.0 + 2.0"), dsl::ParseError);
    try {
        (void)dsl::parse("lam[1][a] <=");
    } catch (const dsl::ParseError& e) {
        CHECK(e.line >= 0);
        CHECK(e.column > 0);
    }
}

TEST_CASE("typecheck catches undeclared references") {
    dsl::Declarations decl;
    decl.num_players = 2;
    decl.actions = {{"a", "b"}, {"a", "b"}};
    decl.cell_ids = {"c1", "c2"};
    CHECK_NOTHROW(dsl::typecheck(dsl::parse("lam[2][b] <= 0.5"), decl));
    CHECK_THROWS_AS(dsl::typecheck(dsl::parse("lam[3][a] <= 0.5"), decl), dsl::ParseError);
    CHECK_THROWS_AS(dsl::typecheck(dsl::parse("lam[1][z] <= 0.5"), decl), dsl::ParseError);
    CHECK_THROWS_AS(dsl::typecheck(dsl::parse("zcell in {c9}"), decl), dsl::ParseError);
}

TEST_CASE("evaluation golden fixtures") {
    auto lams = lambda_pair({1.0, 0.0}, {0.0, 1.0});
    CHECK(dsl::eval(dsl::parse("true"), "c1", lams));
    CHECK(dsl::eval(dsl::parse("lam[1][a] >= 0.5"), "c1", lams));

    auto lams2 = lambda_pair({0.5, 0.5}, {0.2, 0.8});
    CHECK_FALSE(dsl::eval(dsl::parse("min(lam[1][a], lam[2][a]) > 0.25"), "c1", lams2));
    CHECK(dsl::eval(dsl::parse("max(lam[1][a], lam[2][a]) > 0.25"), "c1", lams2));
    CHECK(dsl::eval(dsl::parse("lam[1][a] * lam[2][b] = 0.4"), "c1", lams2));
    CHECK(dsl::eval(dsl::parse("lam[2][b] - lam[2][a] >= 0.5"), "c1", lams2));
    CHECK(dsl::eval(dsl::parse("zcell in {c1, c2}"), "c2", lams2));
    CHECK_FALSE(dsl::eval(dsl::parse("zcell in {c1}"), "c2", lams2));
    CHECK(dsl::eval(dsl::parse("not false"), "c1", lams2));
    CHECK(dsl::eval(dsl::parse("false or lam[1][a] = 0.5"), "c1", lams2));
}

TEST_CASE("evaluation reads z only through the cell id") {
    auto e = dsl::parse("zcell in {c1} or lam[1][a] >= 0.25");
    auto lams = lambda_pair({0.5, 0.5}, {0.5, 0.5});
    CHECK(dsl::eval(e, "c1", lams) == dsl::eval(e, "c1", lams));
}

TEST_CASE("closed-form tagging") {
    CHECK(dsl::is_closed_form(dsl::parse("lam[1][a] >= 0.5")));
    CHECK(dsl::is_closed_form(dsl::parse("lam[1][a] = 0.5 and true")));
    CHECK_FALSE(dsl::is_closed_form(dsl::parse("lam[1][a] > 0.5")));
    CHECK_FALSE(dsl::is_closed_form(dsl::parse("lam[1][a] < 0.5")));
    CHECK_FALSE(dsl::is_closed_form(dsl::parse("not lam[1][a] >= 0.5")));
}

namespace {

// Random well-typed AST generator shared with the acceptance run: builds
// boolean trees over two players with actions {a, b} and cells {c1, c2}.
ExprPtr random_numeric(std::mt19937_64& rng, int depth);

std::shared_ptr<Expr> make(Kind k, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->args = std::move(args);
    return e;
}

ExprPtr random_numeric(std::mt19937_64& rng, int depth) {
    int pick = depth <= 0 ? static_cast<int>(rng() % 2) : static_cast<int>(rng() % 6);
    switch (pick) {
        case 0: {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::Number;
            e->number = static_cast<double>(rng() % 1000) / 64.0;
            return e;
        }
        case 1: {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::Lam;
            e->player = 1 + static_cast<int>(rng() % 2);
            e->action = rng() % 2 ? "a" : "b";
            return e;
        }
        case 2:
            return make(Kind::Add, {random_numeric(rng, depth - 1), random_numeric(rng, depth - 1)});
        case 3:
            return make(Kind::Sub, {random_numeric(rng, depth - 1), random_numeric(rng, depth - 1)});
        case 4:
            return make(Kind::Mul, {random_numeric(rng, depth - 1), random_numeric(rng, depth - 1)});
        default:
            return make(rng() % 2 ? Kind::Min : Kind::Max,
                        {random_numeric(rng, depth - 1), random_numeric(rng, depth - 1)});
    }
}

ExprPtr random_bool(std::mt19937_64& rng, int depth) {
    int pick = depth <= 0 ? static_cast<int>(rng() % 4) : static_cast<int>(rng() % 7);
    switch (pick) {
        case 0: {
            auto e = std::make_shared<Expr>();
            e->kind = rng() % 2 ? Kind::True : Kind::False;
            return e;
        }
        case 1: {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::ZcellIn;
            e->cell_ids.push_back(rng() % 2 ? "c1" : "c2");
            if (rng() % 2) e->cell_ids.push_back("c2");
            return e;
        }
        case 2:
        case 3: {
            auto e = make(Kind::Cmp,
                          {random_numeric(rng, depth - 1), random_numeric(rng, depth - 1)});
            const char* ops[] = {"<", "<=", "=", ">=", ">"};
            e->op = ops[rng() % 5];
            return e;
        }
        case 4:
            return make(Kind::And, {random_bool(rng, depth - 1), random_bool(rng, depth - 1)});
        case 5:
            return make(Kind::Or, {random_bool(rng, depth - 1), random_bool(rng, depth - 1)});
        default:
            return make(Kind::Not, {random_bool(rng, depth - 1)});
    }
}

}  // namespace

TEST_CASE("round trip on random ASTs") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 2000; ++trial) {
        auto e = random_bool(rng, 3);
        std::string text = dsl::print_canonical(e);
        auto back = dsl::parse(text);
        REQUIRE(dsl::structurally_equal(e, back));
        CHECK(dsl::print_canonical(back) == text);
    }
}
