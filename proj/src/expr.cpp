#include "perwave/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace perwave {

namespace {

struct Token {
    enum class Kind { number, ident, op, lparen, rparen, end };
    Kind kind;
    double number = 0.0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ >= s_.size()) {
            tok_ = {Token::Kind::end, 0.0, "<end>"};
            return;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = s_.c_str() + pos_;
            char* stop = nullptr;
            const double v = std::strtod(start, &stop);
            if (stop == start) throw std::invalid_argument("expression: bad number at '" +
                                                           s_.substr(pos_, 8) + "'");
            tok_ = {Token::Kind::number, v, s_.substr(pos_, std::size_t(stop - start))};
            pos_ += std::size_t(stop - start);
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t end = pos_;
            while (end < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                ++end;
            tok_ = {Token::Kind::ident, 0.0, s_.substr(pos_, end - pos_)};
            pos_ = end;
            return;
        }
        if (c == '(') {
            tok_ = {Token::Kind::lparen, 0.0, "("};
            ++pos_;
            return;
        }
        if (c == ')') {
            tok_ = {Token::Kind::rparen, 0.0, ")"};
            ++pos_;
            return;
        }
        if (c == '+' || c == '-' || c == '*' || c == '/') {
            tok_ = {Token::Kind::op, 0.0, std::string(1, c)};
            ++pos_;
            return;
        }
        throw std::invalid_argument("expression: unexpected character '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    Token tok_;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.text_ = text;
    Lexer lex(text);

    // recursive descent, emitting RPN
    struct Parser {
        Lexer& lex;
        std::vector<Instr>& prog;

        void expr() {
            term();
            while (lex.peek().kind == Token::Kind::op &&
                   (lex.peek().text == "+" || lex.peek().text == "-")) {
                const std::string op = lex.take().text;
                term();
                prog.push_back({op == "+" ? Op::add : Op::sub});
            }
        }
        void term() {
            factor();
            while (lex.peek().kind == Token::Kind::op &&
                   (lex.peek().text == "*" || lex.peek().text == "/")) {
                const std::string op = lex.take().text;
                factor();
                prog.push_back({op == "*" ? Op::mul : Op::div});
            }
        }
        void factor() {
            if (lex.peek().kind == Token::Kind::op) {
                const std::string op = lex.take().text;
                if (op == "-") {
                    factor();
                    prog.push_back({Op::neg});
                    return;
                }
                if (op == "+") {
                    factor();
                    return;
                }
                throw std::invalid_argument("expression: unexpected operator '" + op + "'");
            }
            primary();
        }
        void primary() {
            const Token t = lex.take();
            switch (t.kind) {
                case Token::Kind::number:
                    prog.push_back({Op::push, t.number});
                    return;
                case Token::Kind::ident: {
                    if (t.text == "x") {
                        prog.push_back({Op::var});
                        return;
                    }
                    if (t.text == "pi") {
                        prog.push_back({Op::push, M_PI});
                        return;
                    }
                    Op fn;
                    if (t.text == "sin")
                        fn = Op::sin_fn;
                    else if (t.text == "cos")
                        fn = Op::cos_fn;
                    else if (t.text == "exp")
                        fn = Op::exp_fn;
                    else
                        throw std::invalid_argument("expression: unknown name '" + t.text + "'");
                    if (lex.take().kind != Token::Kind::lparen)
                        throw std::invalid_argument("expression: expected '(' after '" + t.text +
                                                    "'");
                    expr();
                    if (lex.take().kind != Token::Kind::rparen)
                        throw std::invalid_argument("expression: missing ')' after '" + t.text +
                                                    "(...'");
                    prog.push_back({fn});
                    return;
                }
                case Token::Kind::lparen:
                    expr();
                    if (lex.take().kind != Token::Kind::rparen)
                        throw std::invalid_argument("expression: missing ')'");
                    return;
                default:
                    throw std::invalid_argument("expression: unexpected token '" + t.text + "'");
            }
        }
    } parser{lex, e.prog_};

    parser.expr();
    if (lex.peek().kind != Token::Kind::end)
        throw std::invalid_argument("expression: trailing token '" + lex.peek().text + "'");
    return e;
}

double Expression::eval(double x) const {
    double stack[64];
    int top = -1;
    for (const auto& ins : prog_) {
        switch (ins.op) {
            case Op::push: stack[++top] = ins.value; break;
            case Op::var: stack[++top] = x; break;
            case Op::add: --top; stack[top] += stack[top + 1]; break;
            case Op::sub: --top; stack[top] -= stack[top + 1]; break;
            case Op::mul: --top; stack[top] *= stack[top + 1]; break;
            case Op::div: --top; stack[top] /= stack[top + 1]; break;
            case Op::neg: stack[top] = -stack[top]; break;
            case Op::sin_fn: stack[top] = std::sin(stack[top]); break;
            case Op::cos_fn: stack[top] = std::cos(stack[top]); break;
            case Op::exp_fn: stack[top] = std::exp(stack[top]); break;
        }
    }
    return stack[0];
}

}  // namespace perwave
