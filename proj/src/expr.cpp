#include "adveig/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "adveig/errors.hpp"

namespace adveig::expr {

namespace {

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct FuncEntry {
    const char* name;
    Func func;
};
constexpr FuncEntry kFuncs[] = {{"sin", Func::Sin}, {"cos", Func::Cos},
                                {"exp", Func::Exp}, {"log", Func::Log},
                                {"sqrt", Func::Sqrt}, {"abs", Func::Abs}};

const FuncEntry* lookup_func(const std::string& name) {
    for (const auto& f : kFuncs)
        if (name == f.name) return &f;
    return nullptr;
}

}  // namespace

std::vector<Token> tokenize(const std::string& source) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = source.size();
    while (i < n) {
        char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.offset = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            std::size_t j = i;
            while (j < n && (std::isdigit(static_cast<unsigned char>(source[j])) || source[j] == '.')) ++j;
            if (j < n && (source[j] == 'e' || source[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (source[k] == '+' || source[k] == '-')) ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(source[k]))) {
                    ++k;
                    while (k < n && std::isdigit(static_cast<unsigned char>(source[k]))) ++k;
                    j = k;
                }
            }
            tok.kind = TokenKind::Number;
            tok.number = std::strtod(source.substr(i, j - i).c_str(), nullptr);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && ident_char(source[j])) ++j;
            tok.kind = TokenKind::Ident;
            tok.text = source.substr(i, j - i);
            i = j;
        } else {
            switch (c) {
                case '+': tok.kind = TokenKind::Plus; break;
                case '-': tok.kind = TokenKind::Minus; break;
                case '*': tok.kind = TokenKind::Star; break;
                case '/': tok.kind = TokenKind::Slash; break;
                case '^': tok.kind = TokenKind::Caret; break;
                case '(': tok.kind = TokenKind::LParen; break;
                case ')': tok.kind = TokenKind::RParen; break;
                case ',': tok.kind = TokenKind::Comma; break;
                default:
                    raise("IllegalCharacter", "character '" + std::string(1, c) +
                                                  "' at offset " + std::to_string(i));
            }
            ++i;
        }
        tokens.push_back(std::move(tok));
    }
    return tokens;
}

namespace {

class Parser {
  public:
    explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

    NodePtr run() {
        NodePtr root = parse_sum();
        if (pos_ < toks_.size()) {
            if (toks_[pos_].kind == TokenKind::RParen)
                raise("UnbalancedParentheses",
                      "unmatched ')' at offset " + std::to_string(toks_[pos_].offset));
            raise("TrailingInput", "unconsumed input at offset " + std::to_string(toks_[pos_].offset));
        }
        return root;
    }

  private:
    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;

    bool at(TokenKind k) const { return pos_ < toks_.size() && toks_[pos_].kind == k; }

    const Token& expect(TokenKind k, const char* what) {
        if (!at(k)) {
            if (k == TokenKind::RParen)
                raise("UnbalancedParentheses", std::string("missing ')' for ") + what);
            raise("UnexpectedToken", std::string("expected ") + what);
        }
        return toks_[pos_++];
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
            BinaryOp op = toks_[pos_].kind == TokenKind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            ++pos_;
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Binary;
            node->op = op;
            node->lhs = std::move(lhs);
            node->rhs = parse_product();
            lhs = std::move(node);
        }
        return lhs;
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        while (at(TokenKind::Star) || at(TokenKind::Slash)) {
            BinaryOp op = toks_[pos_].kind == TokenKind::Star ? BinaryOp::Mul : BinaryOp::Div;
            ++pos_;
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Binary;
            node->op = op;
            node->lhs = std::move(lhs);
            node->rhs = parse_unary();
            lhs = std::move(node);
        }
        return lhs;
    }

    // Unary minus binds looser than ^, so -x^2 is -(x^2).
    NodePtr parse_unary() {
        if (at(TokenKind::Minus)) {
            ++pos_;
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Unary;
            node->lhs = parse_unary();
            return node;
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (at(TokenKind::Caret)) {
            ++pos_;
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Binary;
            node->op = BinaryOp::Pow;
            node->lhs = std::move(base);
            node->rhs = parse_unary();  // right-associative, allows 2^-3
            return node;
        }
        return base;
    }

    NodePtr parse_atom() {
        if (pos_ >= toks_.size()) raise("UnexpectedToken", "unexpected end of input");
        const Token& tok = toks_[pos_];
        if (tok.kind == TokenKind::Number) {
            ++pos_;
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Number;
            node->number = tok.number;
            return node;
        }
        if (tok.kind == TokenKind::LParen) {
            ++pos_;
            NodePtr inner = parse_sum();
            expect(TokenKind::RParen, "subexpression");
            return inner;
        }
        if (tok.kind == TokenKind::Ident) {
            ++pos_;
            if (tok.text == "x" || tok.text == "y") {
                auto node = std::make_unique<Node>();
                node->kind = NodeKind::Var;
                node->var = tok.text[0];
                return node;
            }
            if (tok.text == "pi") {
                auto node = std::make_unique<Node>();
                node->kind = NodeKind::Number;
                node->number = M_PI;
                return node;
            }
            const FuncEntry* f = lookup_func(tok.text);
            if (!f)
                raise("UnknownFunction", "'" + tok.text + "' at offset " + std::to_string(tok.offset));
            expect(TokenKind::LParen, ("argument of " + tok.text).c_str());
            auto node = std::make_unique<Node>();
            node->kind = NodeKind::Call;
            node->func = f->func;
            node->lhs = parse_sum();
            expect(TokenKind::RParen, ("argument of " + tok.text).c_str());
            return node;
        }
        raise("UnexpectedToken", "at offset " + std::to_string(tok.offset));
    }
};

bool walk_uses_y(const Node* n) {
    if (!n) return false;
    if (n->kind == NodeKind::Var && n->var == 'y') return true;
    return walk_uses_y(n->lhs.get()) || walk_uses_y(n->rhs.get());
}

NodePtr clone(const Node* n) {
    if (!n) return nullptr;
    auto c = std::make_unique<Node>();
    c->kind = n->kind;
    c->number = n->number;
    c->var = n->var;
    c->op = n->op;
    c->func = n->func;
    c->lhs = clone(n->lhs.get());
    c->rhs = clone(n->rhs.get());
    return c;
}

double eval_node(const Node* n, double x, double y, bool has_y) {
    switch (n->kind) {
        case NodeKind::Number:
            return n->number;
        case NodeKind::Var:
            if (n->var == 'y') {
                if (!has_y) raise("MissingVariable", "expression uses y on a 1D grid");
                return y;
            }
            return x;
        case NodeKind::Unary:
            return -eval_node(n->lhs.get(), x, y, has_y);
        case NodeKind::Call: {
            double v = eval_node(n->lhs.get(), x, y, has_y);
            switch (n->func) {
                case Func::Sin: return std::sin(v);
                case Func::Cos: return std::cos(v);
                case Func::Exp: return std::exp(v);
                case Func::Log:
                    if (v <= 0.0) raise("DomainError", "log of non-positive argument");
                    return std::log(v);
                case Func::Sqrt:
                    if (v < 0.0) raise("DomainError", "sqrt of negative argument");
                    return std::sqrt(v);
                case Func::Abs: return std::fabs(v);
            }
            return 0.0;
        }
        case NodeKind::Binary: {
            double a = eval_node(n->lhs.get(), x, y, has_y);
            double b = eval_node(n->rhs.get(), x, y, has_y);
            switch (n->op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return a / b;
                case BinaryOp::Pow:
                    if (a < 0.0 && std::nearbyint(b) != b)
                        raise("DomainError", "negative base with non-integer exponent");
                    if (a == 0.0 && b < 0.0) raise("DomainError", "zero base with negative exponent");
                    return std::pow(a, b);
            }
            return 0.0;
        }
    }
    return 0.0;
}

void print_node(const Node* n, std::string& out) {
    char buf[40];
    switch (n->kind) {
        case NodeKind::Number:
            std::snprintf(buf, sizeof buf, "%.17g", n->number);
            out += buf;
            break;
        case NodeKind::Var:
            out += n->var;
            break;
        case NodeKind::Unary:
            out += "(-";
            print_node(n->lhs.get(), out);
            out += ')';
            break;
        case NodeKind::Call: {
            static const char* names[] = {"sin", "cos", "exp", "log", "sqrt", "abs"};
            out += names[static_cast<int>(n->func)];
            out += '(';
            print_node(n->lhs.get(), out);
            out += ')';
            break;
        }
        case NodeKind::Binary: {
            static const char* ops[] = {"+", "-", "*", "/", "^"};
            out += '(';
            print_node(n->lhs.get(), out);
            out += ops[static_cast<int>(n->op)];
            print_node(n->rhs.get(), out);
            out += ')';
            break;
        }
    }
}

}  // namespace

Ast::Ast(NodePtr root) : root_(std::move(root)), uses_y_(walk_uses_y(root_.get())) {}

Ast::Ast(const Ast& other) : root_(clone(other.root_.get())), uses_y_(other.uses_y_) {}

Ast& Ast::operator=(const Ast& other) {
    if (this != &other) {
        root_ = clone(other.root_.get());
        uses_y_ = other.uses_y_;
    }
    return *this;
}

double Ast::eval(double x, double y, bool has_y) const {
    if (!root_) raise("UnexpectedToken", "evaluating empty expression");
    return eval_node(root_.get(), x, y, has_y);
}

std::string Ast::print() const {
    std::string out;
    if (root_) print_node(root_.get(), out);
    return out;
}

Ast parse(const std::vector<Token>& tokens) {
    if (tokens.empty()) raise("UnexpectedToken", "empty expression");
    Parser p(tokens);
    return Ast(p.run());
}

Ast parse(const std::string& source) { return parse(tokenize(source)); }

}  // namespace adveig::expr
