#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mapek/error.hpp"
#include "mapek/policy/state.hpp"

namespace mapek::policy {

enum class CompareOp { less, less_equal, greater, greater_equal, equal, not_equal };

std::string_view to_string(CompareOp op);

/// Condition AST. Leaves are property comparisons against a number and
/// event-frequency comparisons against an integer; inner nodes are
/// not/and/or. Binary nodes always hold exactly two operands.
struct Expression {
    enum class Kind { comparison, frequency, negation, conjunction, disjunction };

    Kind kind = Kind::comparison;
    std::string name;  // property path, or event name for frequency
    CompareOp op = CompareOp::equal;
    double literal = 0.0;
    Tick window = 0;
    std::int64_t count = 0;
    std::vector<Expression> operands;

    static Expression comparison(std::string path, CompareOp op, double literal);
    static Expression frequency(std::string event, Tick window, CompareOp op, std::int64_t count);
    static Expression negation(Expression operand);
    static Expression conjunction(Expression lhs, Expression rhs);
    static Expression disjunction(Expression lhs, Expression rhs);

    friend bool operator==(const Expression&, const Expression&) = default;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t offset)
        : Error("syntax-error", message + " at offset " + std::to_string(offset),
                "offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// expr := or; or := and ('or' and)*; and := unary ('and' unary)*;
/// unary := 'not' unary | '(' expr ')' | PATH OP NUMBER | 'freq(' NAME ',' INT ')' OP INT
Expression parse_expression(std::string_view text);

/// Minimal-parenthesis rendering; parse_expression(to_string(e)) == e.
std::string to_string(const Expression& expr);

/// Throws Error{"unknown-property"} naming the first path missing from the view.
bool eval_expression(const Expression& expr, const StateView& view, Tick now);

/// Property paths in evaluation order (duplicates kept).
std::vector<std::string> referenced_properties(const Expression& expr);
/// Event names used by freq() leaves, in pre-order.
std::vector<std::string> referenced_events(const Expression& expr);

}  // namespace mapek::policy
