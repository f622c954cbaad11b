#include "pieq/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace pieq::dsl {

namespace {

struct Token {
    enum class Type { Ident, Number, Punct, End } type;
    std::string text;
    double number = 0.0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { advance(); }

    const Token& peek() const { return current_; }

    Token next() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            bump();
        current_.line = line_;
        current_.col = col_;
        if (pos_ >= text_.size()) {
            current_.type = Token::Type::End;
            current_.text.clear();
            return;
        }
        char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                bump();
            current_.type = Token::Type::Ident;
            current_.text = std::string(text_.substr(start, pos_ - start));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                    text_[pos_] == 'e' || text_[pos_] == 'E' ||
                    ((text_[pos_] == '+' || text_[pos_] == '-') && pos_ > start &&
                     (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E'))))
                bump();
            std::string s(text_.substr(start, pos_ - start));
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw ParseError("malformed number '" + s + "'", current_.line, current_.col);
            current_.type = Token::Type::Number;
            current_.text = std::move(s);
            current_.number = v;
            return;
        }
        // Two-character comparison operators first.
        if ((c == '<' || c == '>') && pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
            current_.type = Token::Type::Punct;
            current_.text = std::string(1, c) + "=";
            bump();
            bump();
            return;
        }
        static constexpr std::string_view singles = "()[]{}<>=+-*,";
        if (singles.find(c) == std::string_view::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
        current_.type = Token::Type::Punct;
        current_.text = std::string(1, c);
        bump();
    }

    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token current_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) {}

    ExprPtr run() {
        ExprPtr e = parse_or();
        const Token& t = lex_.peek();
        if (t.type != Token::Type::End)
            throw ParseError("unexpected trailing input '" + t.text + "'", t.line, t.col);
        return e;
    }

private:
    bool is_kw(const Token& t, std::string_view kw) const {
        return t.type == Token::Type::Ident && t.text == kw;
    }
    bool is_punct(const Token& t, std::string_view p) const {
        return t.type == Token::Type::Punct && t.text == p;
    }
    Token expect_punct(std::string_view p) {
        Token t = lex_.next();
        if (!is_punct(t, p))
            throw ParseError("expected '" + std::string(p) + "', got '" + t.text + "'", t.line,
                             t.col);
        return t;
    }

    static ExprPtr make(Kind k, std::vector<ExprPtr> args = {}) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->args = std::move(args);
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (is_kw(lex_.peek(), "or")) {
            lex_.next();
            lhs = make(Kind::Or, {lhs, parse_and()});
        }
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (is_kw(lex_.peek(), "and")) {
            lex_.next();
            lhs = make(Kind::And, {lhs, parse_not()});
        }
        return lhs;
    }

    ExprPtr parse_not() {
        if (is_kw(lex_.peek(), "not")) {
            lex_.next();
            return make(Kind::Not, {parse_not()});
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        const Token& t = lex_.peek();
        if (is_kw(t, "true")) {
            lex_.next();
            return make(Kind::True);
        }
        if (is_kw(t, "false")) {
            lex_.next();
            return make(Kind::False);
        }
        if (is_kw(t, "zcell")) {
            lex_.next();
            Token kw = lex_.next();
            if (!is_kw(kw, "in"))
                throw ParseError("expected 'in' after zcell", kw.line, kw.col);
            expect_punct("{");
            auto e = std::make_shared<Expr>();
            e->kind = Kind::ZcellIn;
            while (true) {
                Token id = lex_.next();
                if (id.type != Token::Type::Ident)
                    throw ParseError("expected cell identifier", id.line, id.col);
                e->cell_ids.push_back(id.text);
                Token sep = lex_.next();
                if (is_punct(sep, "}")) break;
                if (!is_punct(sep, ","))
                    throw ParseError("expected ',' or '}' in cell list", sep.line, sep.col);
            }
            return e;
        }
        ExprPtr lhs = parse_sum();
        const Token& op = lex_.peek();
        if (op.type == Token::Type::Punct &&
            (op.text == "<" || op.text == "<=" || op.text == "=" || op.text == ">=" ||
             op.text == ">")) {
            std::string o = lex_.next().text;
            auto e = std::make_shared<Expr>();
            e->kind = Kind::Cmp;
            e->op = std::move(o);
            e->args = {lhs, parse_sum()};
            return e;
        }
        return lhs;
    }

    ExprPtr parse_sum() {
        ExprPtr lhs = parse_prod();
        while (is_punct(lex_.peek(), "+") || is_punct(lex_.peek(), "-")) {
            bool plus = lex_.next().text == "+";
            lhs = make(plus ? Kind::Add : Kind::Sub, {lhs, parse_prod()});
        }
        return lhs;
    }

    ExprPtr parse_prod() {
        ExprPtr lhs = parse_atom();
        while (is_punct(lex_.peek(), "*")) {
            lex_.next();
            lhs = make(Kind::Mul, {lhs, parse_atom()});
        }
        return lhs;
    }

    ExprPtr parse_atom() {
        Token t = lex_.next();
        if (t.type == Token::Type::Number) {
            auto e = std::make_shared<Expr>();
            e->kind = Kind::Number;
            e->number = t.number;
            return e;
        }
        if (is_kw(t, "lam")) {
            expect_punct("[");
            Token idx = lex_.next();
            if (idx.type != Token::Type::Number || idx.number != std::floor(idx.number))
                throw ParseError("expected integer player index", idx.line, idx.col);
            expect_punct("]");
            expect_punct("[");
            Token act = lex_.next();
            if (act.type != Token::Type::Ident)
                throw ParseError("expected action identifier", act.line, act.col);
            expect_punct("]");
            auto e = std::make_shared<Expr>();
            e->kind = Kind::Lam;
            e->player = static_cast<int>(idx.number);
            e->action = act.text;
            return e;
        }
        if (is_kw(t, "min") || is_kw(t, "max")) {
            Kind k = t.text == "min" ? Kind::Min : Kind::Max;
            expect_punct("(");
            std::vector<ExprPtr> args;
            while (true) {
                args.push_back(parse_sum());
                Token sep = lex_.next();
                if (is_punct(sep, ")")) break;
                if (!is_punct(sep, ","))
                    throw ParseError("expected ',' or ')' in argument list", sep.line, sep.col);
            }
            if (args.empty()) throw ParseError("empty argument list", t.line, t.col);
            return make(k, std::move(args));
        }
        if (is_punct(t, "(")) {
            ExprPtr e = parse_or();
            expect_punct(")");
            return e;
        }
        throw ParseError("unexpected token '" + t.text + "'", t.line, t.col);
    }

    Lexer lex_;
};

enum class Type { Bool, Num };

Type type_of(const ExprPtr& e, const Declarations* decl) {
    switch (e->kind) {
        case Kind::Number:
            return Type::Num;
        case Kind::Lam:
            if (decl != nullptr) {
                if (e->player < 1 || e->player > decl->num_players)
                    throw ParseError("undeclared player index " + std::to_string(e->player), 0, 0);
                const auto& acts = decl->actions[static_cast<std::size_t>(e->player - 1)];
                if (std::find(acts.begin(), acts.end(), e->action) == acts.end())
                    throw ParseError("undeclared action '" + e->action + "' for player " +
                                         std::to_string(e->player),
                                     0, 0);
            }
            return Type::Num;
        case Kind::True:
        case Kind::False:
            return Type::Bool;
        case Kind::ZcellIn:
            if (decl != nullptr) {
                for (const auto& id : e->cell_ids)
                    if (std::find(decl->cell_ids.begin(), decl->cell_ids.end(), id) ==
                        decl->cell_ids.end())
                        throw ParseError("undeclared cell '" + id + "'", 0, 0);
            }
            return Type::Bool;
        case Kind::Cmp:
            if (type_of(e->args[0], decl) != Type::Num || type_of(e->args[1], decl) != Type::Num)
                throw ParseError("comparison requires numeric operands", 0, 0);
            return Type::Bool;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Min:
        case Kind::Max:
            for (const auto& a : e->args)
                if (type_of(a, decl) != Type::Num)
                    throw ParseError("numeric operator over boolean operand", 0, 0);
            return Type::Num;
        case Kind::And:
        case Kind::Or:
        case Kind::Not:
            for (const auto& a : e->args)
                if (type_of(a, decl) != Type::Bool)
                    throw ParseError("boolean operator over numeric operand", 0, 0);
            return Type::Bool;
    }
    throw ParseError("corrupt expression node", 0, 0);
}

double eval_num(const ExprPtr& e, std::span<const Distribution> lambdas) {
    switch (e->kind) {
        case Kind::Number:
            return e->number;
        case Kind::Lam: {
            const auto& lam = lambdas[static_cast<std::size_t>(e->player - 1)];
            int idx = lam.index_of(e->action);
            if (idx < 0) throw std::invalid_argument("eval: action not in distribution support");
            return lam.mass(idx);
        }
        case Kind::Add:
            return eval_num(e->args[0], lambdas) + eval_num(e->args[1], lambdas);
        case Kind::Sub:
            return eval_num(e->args[0], lambdas) - eval_num(e->args[1], lambdas);
        case Kind::Mul:
            return eval_num(e->args[0], lambdas) * eval_num(e->args[1], lambdas);
        case Kind::Min: {
            double v = eval_num(e->args[0], lambdas);
            for (std::size_t i = 1; i < e->args.size(); ++i)
                v = std::min(v, eval_num(e->args[i], lambdas));
            return v;
        }
        case Kind::Max: {
            double v = eval_num(e->args[0], lambdas);
            for (std::size_t i = 1; i < e->args.size(); ++i)
                v = std::max(v, eval_num(e->args[i], lambdas));
            return v;
        }
        default:
            throw std::invalid_argument("eval: boolean node in numeric position");
    }
}

std::string format_number(double v) {
    std::ostringstream oss;
    oss.precision(17);
    oss << v;
    return oss.str();
}

void print(const ExprPtr& e, std::string& out) {
    switch (e->kind) {
        case Kind::Number:
            out += format_number(e->number);
            break;
        case Kind::Lam:
            out += "lam[" + std::to_string(e->player) + "][" + e->action + "]";
            break;
        case Kind::True:
            out += "true";
            break;
        case Kind::False:
            out += "false";
            break;
        case Kind::ZcellIn:
            out += "(zcell in {";
            for (std::size_t i = 0; i < e->cell_ids.size(); ++i) {
                if (i > 0) out += ", ";
                out += e->cell_ids[i];
            }
            out += "})";
            break;
        case Kind::Cmp:
            out += "(";
            print(e->args[0], out);
            out += " " + e->op + " ";
            print(e->args[1], out);
            out += ")";
            break;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul: {
            const char* op = e->kind == Kind::Add ? " + " : e->kind == Kind::Sub ? " - " : " * ";
            out += "(";
            print(e->args[0], out);
            out += op;
            print(e->args[1], out);
            out += ")";
            break;
        }
        case Kind::Min:
        case Kind::Max:
            out += e->kind == Kind::Min ? "min(" : "max(";
            for (std::size_t i = 0; i < e->args.size(); ++i) {
                if (i > 0) out += ", ";
                print(e->args[i], out);
            }
            out += ")";
            break;
        case Kind::And:
        case Kind::Or: {
            out += "(";
            print(e->args[0], out);
            out += e->kind == Kind::And ? " and " : " or ";
            print(e->args[1], out);
            out += ")";
            break;
        }
        case Kind::Not:
            out += "(not ";
            print(e->args[0], out);
            out += ")";
            break;
    }
}

}  // namespace

ExprPtr parse(std::string_view text) {
    Parser p(text);
    ExprPtr e = p.run();
    if (type_of(e, nullptr) != Type::Bool)
        throw ParseError("predicate must be boolean at the root", 1, 1);
    return e;
}

std::string print_canonical(const ExprPtr& e) {
    std::string out;
    print(e, out);
    return out;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
    if (a->kind == Kind::Number && a->number != b->number) return false;
    if (a->kind == Kind::Lam && (a->player != b->player || a->action != b->action)) return false;
    if (a->kind == Kind::Cmp && a->op != b->op) return false;
    if (a->kind == Kind::ZcellIn && a->cell_ids != b->cell_ids) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!structurally_equal(a->args[i], b->args[i])) return false;
    return true;
}

void typecheck(const ExprPtr& e, const Declarations& decl) {
    if (type_of(e, &decl) != Type::Bool)
        throw ParseError("predicate must be boolean at the root", 1, 1);
}

bool eval(const ExprPtr& e, std::string_view z_cell, std::span<const Distribution> lambdas) {
    switch (e->kind) {
        case Kind::True:
            return true;
        case Kind::False:
            return false;
        case Kind::ZcellIn:
            return std::find(e->cell_ids.begin(), e->cell_ids.end(), z_cell) != e->cell_ids.end();
        case Kind::Cmp: {
            double l = eval_num(e->args[0], lambdas);
            double r = eval_num(e->args[1], lambdas);
            if (e->op == "<") return l < r;
            if (e->op == "<=") return l <= r;
            if (e->op == "=") return l == r;
            if (e->op == ">=") return l >= r;
            return l > r;
        }
        case Kind::And:
            return eval(e->args[0], z_cell, lambdas) && eval(e->args[1], z_cell, lambdas);
        case Kind::Or:
            return eval(e->args[0], z_cell, lambdas) || eval(e->args[1], z_cell, lambdas);
        case Kind::Not:
            return !eval(e->args[0], z_cell, lambdas);
        default:
            throw std::invalid_argument("eval: numeric node in boolean position");
    }
}

bool is_closed_form(const ExprPtr& e) {
    if (e->kind == Kind::Not) return false;
    if (e->kind == Kind::Cmp && (e->op == "<" || e->op == ">")) return false;
    return std::all_of(e->args.begin(), e->args.end(), is_closed_form);
}

}  // namespace pieq::dsl
