#pragma once
// Tiny closed-form expression language for coefficient functions: numbers,
// x, y, pi, + - * / ^, unary minus and the functions sin cos exp log sqrt
// abs. Deliberately no user functions and no piecewise syntax; gradients are
// always taken numerically on the grid, never symbolically.

#include <memory>
#include <string>
#include <vector>

namespace adveig::expr {

enum class TokenKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma };

struct Token {
    TokenKind kind;
    double number = 0.0;     // Number
    std::string text;        // Ident
    std::size_t offset = 0;  // byte offset into the source
};

// Throws Error("IllegalCharacter") with the byte offset in the message.
std::vector<Token> tokenize(const std::string& source);

struct Node;
using NodePtr = std::unique_ptr<Node>;

enum class NodeKind { Number, Var, Unary, Binary, Call };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Log, Sqrt, Abs };

struct Node {
    NodeKind kind;
    double number = 0.0;  // Number
    char var = 'x';       // Var: 'x' or 'y'
    BinaryOp op = BinaryOp::Add;
    Func func = Func::Sin;
    NodePtr lhs, rhs;  // Unary/Call use lhs only
};

class Ast {
  public:
    Ast() = default;
    explicit Ast(NodePtr root);
    Ast(const Ast& other);
    Ast& operator=(const Ast& other);
    Ast(Ast&&) = default;
    Ast& operator=(Ast&&) = default;

    bool valid() const { return root_ != nullptr; }
    bool uses_y() const { return uses_y_; }

    // IEEE double evaluation. Throws Error("DomainError") for log/sqrt of a
    // negative argument (log also rejects 0) and for a negative base raised
    // to a non-integer power; Error("MissingVariable") if the tree
    // references y and has_y is false.
    double eval(double x, double y = 0.0, bool has_y = true) const;

    // Canonical fully parenthesised form; parse(print()) evaluates
    // identically.
    std::string print() const;

  private:
    NodePtr root_;
    bool uses_y_ = false;
};

// Standard precedence: ^ (right-assoc) > unary minus > * / > + -.
// Throws Error with kind UnexpectedToken, UnbalancedParentheses,
// UnknownFunction or TrailingInput.
Ast parse(const std::vector<Token>& tokens);
Ast parse(const std::string& source);

}  // namespace adveig::expr
