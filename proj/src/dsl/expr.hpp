#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "core/function.hpp"

namespace supenv::dsl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, int line, int column);
    int line() const { return line_; }
    int column() const { return column_; }
    // Message without the "line:column: " prefix.
    const std::string& detail() const { return detail_; }

private:
    int line_, column_;
    std::string detail_;
};

class EvalError : public DomainError {
public:
    using DomainError::DomainError;
};

enum class Op { Number, Inf, VarX, VarY, Neg, Abs, Arctan, Add, Sub, Mul, Div, Pow, Min, Max, If };
enum class Cmp { Lt, Le, Eq, Ne, Gt, Ge };

struct Node {
    Op op;
    double number = 0.0;  // Op::Number
    Cmp cmp = Cmp::Eq;    // Op::If
    // If: {lhs, rhs, then, else}; calls and operators: operands in order.
    std::vector<std::shared_ptr<const Node>> args;
};

// Immutable syntax tree. Copies share nodes.
class Expr {
public:
    Expr(std::shared_ptr<const Node> root, int dim) : root_(std::move(root)), dim_(dim) {}
    const Node& root() const { return *root_; }
    // 2 if y occurs, else 1.
    int dim() const { return dim_; }

    friend bool operator==(const Expr& a, const Expr& b);

private:
    std::shared_ptr<const Node> root_;
    int dim_;
};

// `#` starts a comment running to the end of the line.
Expr parse(std::string_view source);

// Extended-real evaluation; throws EvalError on undefined operations.
ExtendedValue eval(const Expr& e, const Point& p);

// Canonical text: minimal parentheses, literals with 17 significant digits.
std::string print(const Expr& e);

// dim = 0 uses the inferred dimension; a larger dim is allowed (unused y).
FunctionSpec to_function_spec(const Expr& e, std::string name, int dim = 0);

}  // namespace supenv::dsl
