#include "mapek/policy/expression.hpp"

#include <cctype>

#include "mapek/numfmt.hpp"

namespace mapek::policy {

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::less: return "<";
        case CompareOp::less_equal: return "<=";
        case CompareOp::greater: return ">";
        case CompareOp::greater_equal: return ">=";
        case CompareOp::equal: return "==";
        case CompareOp::not_equal: return "!=";
    }
    return "?";
}

Expression Expression::comparison(std::string path, CompareOp op, double literal) {
    Expression e;
    e.kind = Kind::comparison;
    e.name = std::move(path);
    e.op = op;
    e.literal = literal;
    return e;
}

Expression Expression::frequency(std::string event, Tick window, CompareOp op, std::int64_t count) {
    Expression e;
    e.kind = Kind::frequency;
    e.name = std::move(event);
    e.window = window;
    e.op = op;
    e.count = count;
    return e;
}

Expression Expression::negation(Expression operand) {
    Expression e;
    e.kind = Kind::negation;
    e.operands.push_back(std::move(operand));
    return e;
}

Expression Expression::conjunction(Expression lhs, Expression rhs) {
    Expression e;
    e.kind = Kind::conjunction;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

Expression Expression::disjunction(Expression lhs, Expression rhs) {
    Expression e;
    e.kind = Kind::disjunction;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    return e;
}

namespace {

enum class Tok { ident, number, op, lparen, rparen, comma, end };

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    std::size_t offset = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) return {Tok::end, {}, start};
        const char c = src_[pos_];
        if (ident_start(c)) {
            while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
            return {Tok::ident, src_.substr(start, pos_ - start), start};
        }
        if (digit(c) || ((c == '-' || c == '.') && pos_ + 1 < src_.size() &&
                         (digit(src_[pos_ + 1]) || src_[pos_ + 1] == '.'))) {
            if (c == '-') ++pos_;
            while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t p = pos_ + 1;
                if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
                if (p < src_.size() && digit(src_[p])) {
                    pos_ = p;
                    while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
                }
            }
            return {Tok::number, src_.substr(start, pos_ - start), start};
        }
        switch (c) {
            case '(': ++pos_; return {Tok::lparen, src_.substr(start, 1), start};
            case ')': ++pos_; return {Tok::rparen, src_.substr(start, 1), start};
            case ',': ++pos_; return {Tok::comma, src_.substr(start, 1), start};
            case '<':
            case '>':
            case '=':
            case '!':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    pos_ += 2;
                    return {Tok::op, src_.substr(start, 2), start};
                }
                if (c == '<' || c == '>') {
                    ++pos_;
                    return {Tok::op, src_.substr(start, 1), start};
                }
                break;
            default: break;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", start);
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

bool is_keyword(std::string_view s) { return s == "and" || s == "or" || s == "not" || s == "freq"; }

class Parser {
public:
    explicit Parser(std::string_view src) : lexer_(src) { advance(); }

    Expression parse() {
        Expression e = parse_or();
        if (cur_.kind != Tok::end) throw SyntaxError("unexpected '" + std::string(cur_.text) + "'", cur_.offset);
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    bool at_keyword(std::string_view kw) const { return cur_.kind == Tok::ident && cur_.text == kw; }

    Expression parse_or() {
        Expression lhs = parse_and();
        while (at_keyword("or")) {
            advance();
            lhs = Expression::disjunction(std::move(lhs), parse_and());
        }
        return lhs;
    }

    Expression parse_and() {
        Expression lhs = parse_unary();
        while (at_keyword("and")) {
            advance();
            lhs = Expression::conjunction(std::move(lhs), parse_unary());
        }
        return lhs;
    }

    Expression parse_unary() {
        if (at_keyword("not")) {
            advance();
            return Expression::negation(parse_unary());
        }
        if (cur_.kind == Tok::lparen) {
            advance();
            Expression inner = parse_or();
            expect(Tok::rparen, "')'");
            return inner;
        }
        if (at_keyword("freq")) return parse_frequency();
        if (cur_.kind == Tok::ident && !is_keyword(cur_.text)) {
            std::string path(cur_.text);
            advance();
            const CompareOp op = parse_op();
            const double value = parse_number();
            return Expression::comparison(std::move(path), op, value);
        }
        throw SyntaxError("expected condition", cur_.offset);
    }

    Expression parse_frequency() {
        advance();
        expect(Tok::lparen, "'('");
        if (cur_.kind != Tok::ident || is_keyword(cur_.text)) {
            throw SyntaxError("expected event name", cur_.offset);
        }
        std::string event(cur_.text);
        advance();
        expect(Tok::comma, "','");
        const std::size_t window_offset = cur_.offset;
        const std::int64_t window = parse_integer();
        if (window < 1) throw SyntaxError("window must be at least 1", window_offset);
        expect(Tok::rparen, "')'");
        const CompareOp op = parse_op();
        const std::int64_t count = parse_integer();
        return Expression::frequency(std::move(event), static_cast<Tick>(window), op, count);
    }

    CompareOp parse_op() {
        if (cur_.kind != Tok::op) throw SyntaxError("expected comparison operator", cur_.offset);
        const auto t = cur_.text;
        CompareOp op = CompareOp::equal;
        if (t == "<") op = CompareOp::less;
        else if (t == "<=") op = CompareOp::less_equal;
        else if (t == ">") op = CompareOp::greater;
        else if (t == ">=") op = CompareOp::greater_equal;
        else if (t == "==") op = CompareOp::equal;
        else op = CompareOp::not_equal;
        advance();
        return op;
    }

    double parse_number() {
        if (cur_.kind != Tok::number) throw SyntaxError("expected number", cur_.offset);
        auto v = parse_double(cur_.text);
        if (!v) throw SyntaxError("invalid number", cur_.offset);
        advance();
        return *v;
    }

    std::int64_t parse_integer() {
        if (cur_.kind != Tok::number) throw SyntaxError("expected integer", cur_.offset);
        auto v = parse_signed(cur_.text);
        if (!v || *v < 0) throw SyntaxError("expected non-negative integer", cur_.offset);
        advance();
        return *v;
    }

    void expect(Tok kind, const char* what) {
        if (cur_.kind != kind) throw SyntaxError(std::string("expected ") + what, cur_.offset);
        advance();
    }

    Lexer lexer_;
    Token cur_;
};

int precedence(const Expression& e) {
    switch (e.kind) {
        case Expression::Kind::disjunction: return 1;
        case Expression::Kind::conjunction: return 2;
        case Expression::Kind::negation: return 3;
        default: return 4;
    }
}

void print(const Expression& e, std::string& out);

void print_operand(const Expression& e, bool parens, std::string& out) {
    if (parens) out += '(';
    print(e, out);
    if (parens) out += ')';
}

void print(const Expression& e, std::string& out) {
    switch (e.kind) {
        case Expression::Kind::comparison:
            out += e.name;
            out += ' ';
            out += to_string(e.op);
            out += ' ';
            out += format_number(e.literal);
            break;
        case Expression::Kind::frequency:
            out += "freq(" + e.name + ", " + std::to_string(e.window) + ") ";
            out += to_string(e.op);
            out += ' ' + std::to_string(e.count);
            break;
        case Expression::Kind::negation:
            out += "not ";
            print_operand(e.operands[0], precedence(e.operands[0]) < 3, out);
            break;
        case Expression::Kind::conjunction:
        case Expression::Kind::disjunction: {
            const int p = precedence(e);
            print_operand(e.operands[0], precedence(e.operands[0]) < p, out);
            out += e.kind == Expression::Kind::conjunction ? " and " : " or ";
            print_operand(e.operands[1], precedence(e.operands[1]) <= p, out);
            break;
        }
    }
}

template <typename T>
bool compare(T lhs, CompareOp op, T rhs) {
    switch (op) {
        case CompareOp::less: return lhs < rhs;
        case CompareOp::less_equal: return lhs <= rhs;
        case CompareOp::greater: return lhs > rhs;
        case CompareOp::greater_equal: return lhs >= rhs;
        case CompareOp::equal: return lhs == rhs;
        case CompareOp::not_equal: return lhs != rhs;
    }
    return false;
}

void collect(const Expression& e, Expression::Kind kind, std::vector<std::string>& out) {
    if (e.kind == kind) out.push_back(e.name);
    for (const auto& child : e.operands) collect(child, kind, out);
}

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Expression& expr) {
    std::string out;
    print(expr, out);
    return out;
}

bool eval_expression(const Expression& expr, const StateView& view, Tick now) {
    switch (expr.kind) {
        case Expression::Kind::comparison: {
            const auto value = view.state.value(expr.name);
            if (!value) throw Error("unknown-property", "unknown property '" + expr.name + "'", expr.name);
            return compare(*value, expr.op, expr.literal);
        }
        case Expression::Kind::frequency: {
            const auto n = static_cast<std::int64_t>(window_frequency(view, expr.name, expr.window, now));
            return compare(n, expr.op, expr.count);
        }
        case Expression::Kind::negation: return !eval_expression(expr.operands[0], view, now);
        case Expression::Kind::conjunction:
            return eval_expression(expr.operands[0], view, now) && eval_expression(expr.operands[1], view, now);
        case Expression::Kind::disjunction:
            return eval_expression(expr.operands[0], view, now) || eval_expression(expr.operands[1], view, now);
    }
    return false;
}

std::vector<std::string> referenced_properties(const Expression& expr) {
    std::vector<std::string> out;
    collect(expr, Expression::Kind::comparison, out);
    return out;
}

std::vector<std::string> referenced_events(const Expression& expr) {
    std::vector<std::string> out;
    collect(expr, Expression::Kind::frequency, out);
    return out;
}

}  // namespace mapek::policy
