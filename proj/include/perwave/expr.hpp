#pragma once

#include <string>
#include <vector>

namespace perwave {

/// Arithmetic expression in the variable x: numbers, pi, x, + - * /,
/// unary minus, parentheses, sin, cos, exp.  Parse errors name the token.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(double x) const;
    const std::string& text() const { return text_; }

private:
    enum class Op { push, var, add, sub, mul, div, neg, sin_fn, cos_fn, exp_fn };
    struct Instr {
        Op op;
        double value = 0.0;
    };
    std::vector<Instr> prog_;
    std::string text_;
};

}  // namespace perwave
