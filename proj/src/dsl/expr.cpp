#include "dsl/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>

namespace supenv::dsl {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, Cmp, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0.0;
    Cmp cmp = Cmp::Eq;
    int line = 1, column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_blank();
        Token t;
        t.line = line_;
        t.column = column_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < src_.size() &&
                                                            std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            return number(t);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(pos_, end - pos_));
            advance(end - pos_);
            return t;
        }
        auto single = [&](Tok kind) {
            t.kind = kind;
            t.text = std::string(1, c);
            advance(1);
            return t;
        };
        switch (c) {
            case '+': return single(Tok::Plus);
            case '-': return single(Tok::Minus);
            case '*': return single(Tok::Star);
            case '/': return single(Tok::Slash);
            case '^': return single(Tok::Caret);
            case '(': return single(Tok::LParen);
            case ')': return single(Tok::RParen);
            case ',': return single(Tok::Comma);
            default: break;
        }
        static const struct {
            std::string_view text;
            Cmp cmp;
        } kCmps[] = {{"<=", Cmp::Le}, {">=", Cmp::Ge}, {"!=", Cmp::Ne}, {"\xE2\x89\xA4", Cmp::Le},
                     {"\xE2\x89\xA5", Cmp::Ge}, {"\xE2\x89\xA0", Cmp::Ne}, {"<", Cmp::Lt}, {">", Cmp::Gt},
                     {"=", Cmp::Eq}};
        for (const auto& k : kCmps) {
            if (src_.substr(pos_, k.text.size()) == k.text) {
                t.kind = Tok::Cmp;
                t.cmp = k.cmp;
                t.text = std::string(k.text);
                advance(k.text.size());
                return t;
            }
        }
        std::size_t len = 1;
        while (pos_ + len < src_.size() && (static_cast<unsigned char>(src_[pos_ + len]) & 0xC0) == 0x80) ++len;
        throw ParseError("unexpected character '" + std::string(src_.substr(pos_, len)) + "'", line_, column_);
    }

private:
    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i, ++pos_) {
            const auto b = static_cast<unsigned char>(src_[pos_]);
            if (b == '\n') {
                ++line_;
                column_ = 1;
            } else if ((b & 0xC0) != 0x80) {
                ++column_;
            }
        }
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance(1);
            } else {
                break;
            }
        }
    }

    Token number(Token& t) {
        std::size_t end = pos_;
        auto digits = [&] {
            while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
        };
        digits();
        if (end < src_.size() && src_[end] == '.') {
            ++end;
            digits();
        }
        if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
            if (e < src_.size() && std::isdigit(static_cast<unsigned char>(src_[e]))) {
                end = e;
                digits();
            }
        }
        t.kind = Tok::Number;
        t.text = std::string(src_.substr(pos_, end - pos_));
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
        if (ec != std::errc() || ptr != t.text.data() + t.text.size())
            throw ParseError("number '" + t.text + "' is out of range", line_, column_);
        advance(end - pos_);
        return t;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, column_ = 1;
};

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, std::vector<NodePtr> args = {}, double number = 0.0, Cmp cmp = Cmp::Eq) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->number = number;
    n->cmp = cmp;
    return n;
}

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { tok_ = lex_.next(); }

    Expr run() {
        NodePtr root = expr();
        if (tok_.kind != Tok::End) fail("unexpected '" + tok_.text + "' after expression");
        return Expr(root, uses_y_ ? 2 : 1);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.line, tok_.column); }

    void shift() { tok_ = lex_.next(); }
    bool at_keyword(std::string_view kw) const { return tok_.kind == Tok::Ident && tok_.text == kw; }
    void expect(Tok kind, std::string_view what) {
        if (tok_.kind != kind) fail("expected " + std::string(what) + ", found " + describe());
        shift();
    }
    void expect_keyword(std::string_view kw) {
        if (!at_keyword(kw)) fail("expected '" + std::string(kw) + "', found " + describe());
        shift();
    }
    std::string describe() const { return tok_.kind == Tok::End ? "end of input" : "'" + tok_.text + "'"; }

    NodePtr expr() {
        if (!at_keyword("if")) return sum();
        shift();
        const Token lhs_tok = tok_;
        NodePtr lhs = sum();
        if (tok_.kind != Tok::Cmp) fail("expected a comparison operator, found " + describe());
        const Cmp cmp = tok_.cmp;
        shift();
        NodePtr rhs = sum();
        if (lhs->op == Op::Inf && rhs->op == Op::Inf)
            throw ParseError("comparison between two bare 'inf' literals", lhs_tok.line, lhs_tok.column);
        expect_keyword("then");
        NodePtr then_branch = expr();
        expect_keyword("else");
        NodePtr else_branch = expr();
        return make(Op::If, {lhs, rhs, then_branch, else_branch}, 0.0, cmp);
    }

    NodePtr sum() {
        NodePtr left = term();
        while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
            const Op op = tok_.kind == Tok::Plus ? Op::Add : Op::Sub;
            shift();
            left = make(op, {left, term()});
        }
        return left;
    }

    NodePtr term() {
        NodePtr left = unary();
        while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
            const Op op = tok_.kind == Tok::Star ? Op::Mul : Op::Div;
            shift();
            left = make(op, {left, unary()});
        }
        return left;
    }

    NodePtr unary() {
        if (tok_.kind == Tok::Minus) {
            shift();
            return make(Op::Neg, {unary()});
        }
        return power();
    }

    // base ^ exponent, right-associative; the exponent may carry a sign.
    NodePtr power() {
        NodePtr base = primary();
        if (tok_.kind != Tok::Caret) return base;
        shift();
        return make(Op::Pow, {base, unary()});
    }

    NodePtr primary() {
        if (tok_.kind == Tok::Number) {
            const double v = tok_.number;
            shift();
            return make(Op::Number, {}, v);
        }
        if (tok_.kind == Tok::LParen) {
            shift();
            NodePtr inner = expr();
            expect(Tok::RParen, "')'");
            return inner;
        }
        if (tok_.kind != Tok::Ident) fail("expected an expression, found " + describe());

        const Token id = tok_;
        shift();
        if (id.text == "inf") return make(Op::Inf);
        if (id.text == "x") return make(Op::VarX);
        if (id.text == "y") {
            uses_y_ = true;
            return make(Op::VarY);
        }
        Op op;
        int min_args, max_args;
        if (id.text == "abs") {
            op = Op::Abs, min_args = 1, max_args = 1;
        } else if (id.text == "arctan") {
            op = Op::Arctan, min_args = 1, max_args = 1;
        } else if (id.text == "min") {
            op = Op::Min, min_args = 2, max_args = -1;
        } else if (id.text == "max") {
            op = Op::Max, min_args = 2, max_args = -1;
        } else {
            throw ParseError("unknown identifier '" + id.text + "'", id.line, id.column);
        }
        if (tok_.kind != Tok::LParen) fail("expected '(' after '" + id.text + "', found " + describe());
        shift();
        std::vector<NodePtr> args{expr()};
        while (tok_.kind == Tok::Comma) {
            shift();
            args.push_back(expr());
        }
        expect(Tok::RParen, "')' or ','");
        const int n = static_cast<int>(args.size());
        if (n < min_args || (max_args >= 0 && n > max_args)) {
            std::string want = max_args < 0 ? "at least " + std::to_string(min_args) : std::to_string(min_args);
            throw ParseError("arity mismatch: '" + id.text + "' takes " + want + " argument" + (min_args == 1 ? "" : "s") +
                                 ", got " + std::to_string(n),
                             id.line, id.column);
        }
        return make(op, std::move(args));
    }

    Lexer lex_;
    Token tok_;
    bool uses_y_ = false;
};

bool same(const Node& a, const Node& b) {
    if (a.op != b.op || a.args.size() != b.args.size()) return false;
    if (a.op == Op::Number && std::memcmp(&a.number, &b.number, sizeof(double)) != 0) return false;
    if (a.op == Op::If && a.cmp != b.cmp) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!same(*a.args[i], *b.args[i])) return false;
    return true;
}

using EV = ExtendedValue;

EV divide(const EV& a, const EV& b) {
    if (b.is_infinite()) {
        if (a.is_infinite()) throw EvalError("inf / inf is undefined");
        return EV::finite(0.0);
    }
    const double d = b.value();
    if (d == 0.0) {
        if (a.is_infinite() || a.value() > 0) return kInfinity;
        throw EvalError(a.value() == 0 ? "0 / 0 is undefined" : "negative / 0 would be -inf");
    }
    if (a.is_infinite()) {
        if (d > 0) return kInfinity;
        throw EvalError("inf / negative would be -inf");
    }
    return EV::from_double(a.value() / d);
}

EV power(const EV& a, const EV& b) {
    if (a.is_infinite()) {
        if (b.is_infinite()) return kInfinity;
        const double e = b.value();
        return e > 0 ? kInfinity : EV::finite(e == 0 ? 1.0 : 0.0);
    }
    const double base = a.value();
    if (b.is_infinite()) {
        if (base > 1) return kInfinity;
        if (base == 1) return EV::finite(1.0);
        if (base >= 0) return EV::finite(0.0);
        throw EvalError("negative ^ inf is undefined");
    }
    const double e = b.value();
    if (base == 0 && e < 0) return kInfinity;
    const double r = std::pow(base, e);
    if (std::isnan(r)) throw EvalError("negative base with a non-integer exponent");
    return EV::from_double(r);
}

bool compare(Cmp c, const EV& a, const EV& b) {
    switch (c) {
        case Cmp::Lt: return a < b;
        case Cmp::Le: return a <= b;
        case Cmp::Eq: return a == b;
        case Cmp::Ne: return !(a == b);
        case Cmp::Gt: return a > b;
        case Cmp::Ge: return a >= b;
    }
    return false;
}

EV evaluate(const Node& n, const Point& p) {
    switch (n.op) {
        case Op::Number: return EV::finite(n.number);
        case Op::Inf: return kInfinity;
        case Op::VarX: return EV::finite(p[0]);
        case Op::VarY: return EV::finite(p[1]);
        case Op::Neg: return -evaluate(*n.args[0], p);
        case Op::Abs: {
            const EV v = evaluate(*n.args[0], p);
            return v.is_infinite() ? v : EV::finite(std::abs(v.value()));
        }
        case Op::Arctan: {
            const EV v = evaluate(*n.args[0], p);
            return EV::finite(v.is_infinite() ? std::numbers::pi / 2 : std::atan(v.value()));
        }
        case Op::Add: return evaluate(*n.args[0], p) + evaluate(*n.args[1], p);
        case Op::Sub: return evaluate(*n.args[0], p) - evaluate(*n.args[1], p);
        case Op::Mul: return evaluate(*n.args[0], p) * evaluate(*n.args[1], p);
        case Op::Div: return divide(evaluate(*n.args[0], p), evaluate(*n.args[1], p));
        case Op::Pow: return power(evaluate(*n.args[0], p), evaluate(*n.args[1], p));
        case Op::Min:
        case Op::Max: {
            EV acc = evaluate(*n.args[0], p);
            for (std::size_t i = 1; i < n.args.size(); ++i) {
                const EV v = evaluate(*n.args[i], p);
                acc = n.op == Op::Min ? min(acc, v) : max(acc, v);
            }
            return acc;
        }
        case Op::If:
            return compare(n.cmp, evaluate(*n.args[0], p), evaluate(*n.args[1], p)) ? evaluate(*n.args[2], p)
                                                                                       : evaluate(*n.args[3], p);
    }
    throw EvalError("corrupt expression node");
}

// 0 if, 1 sum, 2 term, 3 unary, 4 power, 5 atom
int precedence(const Node& n) {
    switch (n.op) {
        case Op::If: return 0;
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

void emit(const Node& n, int need, std::string& out) {
    const bool paren = precedence(n) < need;
    if (paren) out += '(';
    auto binary = [&](const char* op, int left, int right) {
        emit(*n.args[0], left, out);
        out += op;
        emit(*n.args[1], right, out);
    };
    auto call = [&](const char* name) {
        out += name;
        out += '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) out += ", ";
            emit(*n.args[i], 0, out);
        }
        out += ')';
    };
    switch (n.op) {
        case Op::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n.number);
            out += buf;
            break;
        }
        case Op::Inf: out += "inf"; break;
        case Op::VarX: out += 'x'; break;
        case Op::VarY: out += 'y'; break;
        case Op::Neg:
            out += '-';
            emit(*n.args[0], 3, out);
            break;
        case Op::Abs: call("abs"); break;
        case Op::Arctan: call("arctan"); break;
        case Op::Min: call("min"); break;
        case Op::Max: call("max"); break;
        case Op::Add: binary(" + ", 1, 2); break;
        case Op::Sub: binary(" - ", 1, 2); break;
        case Op::Mul: binary(" * ", 2, 3); break;
        case Op::Div: binary(" / ", 2, 3); break;
        case Op::Pow: binary("^", 5, 3); break;
        case Op::If: {
            static const char* kNames[] = {" < ", " <= ", " = ", " != ", " > ", " >= "};
            out += "if ";
            binary(kNames[static_cast<int>(n.cmp)], 1, 1);
            out += " then ";
            emit(*n.args[2], 0, out);
            out += " else ";
            emit(*n.args[3], 0, out);
            break;
        }
    }
    if (paren) out += ')';
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) { return a.dim_ == b.dim_ && same(*a.root_, *b.root_); }

Expr parse(std::string_view source) { return Parser(source).run(); }

ExtendedValue eval(const Expr& e, const Point& p) {
    try {
        return evaluate(e.root(), p);
    } catch (const EvalError&) {
        throw;
    } catch (const DomainError& err) {
        throw EvalError(err.what());
    }
}

std::string print(const Expr& e) {
    std::string out;
    emit(e.root(), 0, out);
    return out;
}

FunctionSpec to_function_spec(const Expr& e, std::string name, int dim) {
    if (dim == 0) dim = e.dim();
    if (dim < e.dim() || dim > 2)
        throw std::invalid_argument("expression '" + name + "' uses y and cannot be " + std::to_string(dim) + "-dimensional");
    return FunctionSpec(std::move(name), dim, [e](const Point& p) { return eval(e, p); });
}

}  // namespace supenv::dsl
