// Copyright 2026 The Qubus Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qubus {

/// Evaluates a numeric expression such as "sqrt(pi/8)" or "2*pi/3".
/// Grammar: + - * / ^, unary minus, parentheses, constants pi and e,
/// functions sqrt sin cos tan exp log abs.
class Expression {
public:
    static double evaluate(const std::string &text) {
        Expression e(text);
        double v = e.sum();
        e.skip();
        if (e.pos_ != e.s_.size()) {
            e.fail("unexpected character");
        }
        return v;
    }

private:
    explicit Expression(std::string s) : s_(std::move(s)) {}

    [[noreturn]] void fail(const std::string &what) const {
        throw std::invalid_argument("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            pos_++;
        }
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            pos_++;
            return true;
        }
        return false;
    }

    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) {
                v += product();
            } else if (eat('-')) {
                v -= product();
            } else {
                return v;
            }
        }
    }

    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) {
                v *= unary();
            } else if (eat('/')) {
                v /= unary();
            } else {
                return v;
            }
        }
    }

    double unary() {
        if (eat('-')) {
            return -unary();
        }
        if (eat('+')) {
            return unary();
        }
        return power();
    }

    double power() {
        double base = atom();
        if (eat('^')) {
            return std::pow(base, unary());  // right associative
        }
        return base;
    }

    double atom() {
        skip();
        if (eat('(')) {
            double v = sum();
            if (!eat(')')) {
                fail("missing ')'");
            }
            return v;
        }
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) {
                pos_++;
            }
            std::string name = s_.substr(start, pos_ - start);
            if (name == "pi") {
                return std::numbers::pi;
            }
            if (name == "e") {
                return std::numbers::e;
            }
            if (!eat('(')) {
                fail("unknown name '" + name + "'");
            }
            double x = sum();
            if (!eat(')')) {
                fail("missing ')'");
            }
            if (name == "sqrt") return std::sqrt(x);
            if (name == "sin") return std::sin(x);
            if (name == "cos") return std::cos(x);
            if (name == "tan") return std::tan(x);
            if (name == "exp") return std::exp(x);
            if (name == "log") return std::log(x);
            if (name == "abs") return std::abs(x);
            fail("unknown function '" + name + "'");
        }
        const char *begin = s_.c_str() + pos_;
        char *end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) {
            fail("expected a number");
        }
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    std::string s_;
    std::size_t pos_ = 0;
};

}  // namespace qubus
