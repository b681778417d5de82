#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "qc/core/ratfunc.hpp"

namespace qc {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)*
// unary := ('+'|'-') unary | power ; power := atom ('^' exponent)?
// exponent := ['-'] integer | '(' ['-'] integer ')'
class ExprParser {
public:
    explicit ExprParser(std::string_view s) : s_(s) {}

    RatFunc parse() {
        RatFunc r = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected trailing input");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at position " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    RatFunc expr() {
        RatFunc r = term();
        while (true) {
            if (eat('+')) r += term();
            else if (eat('-')) r -= term();
            else return r;
        }
    }
    RatFunc term() {
        RatFunc r = unary();
        while (true) {
            if (eat('*')) r *= unary();
            else if (eat('/')) {
                RatFunc d = unary();
                if (d.is_zero()) fail("division by zero");
                r /= d;
            } else return r;
        }
    }
    RatFunc unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    RatFunc power() {
        RatFunc b = atom();
        if (eat('^')) {
            bool paren = eat('(');
            bool neg = eat('-');
            skip();
            std::size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (st == i_) fail("expected integer exponent");
            long e = std::stol(std::string(s_.substr(st, i_ - st)));
            if (paren && !eat(')')) fail("expected ')'");
            if (neg && b.is_zero()) fail("negative power of zero");
            return b.pow(static_cast<std::int32_t>(neg ? -e : e));
        }
        return b;
    }
    RatFunc atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of input");
        char c = s_[i_];
        if (c == '(') {
            ++i_;
            RatFunc r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t st = i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            return RatFunc(Rat(mpz_class(std::string(s_.substr(st, i_ - st)), 10)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t st = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
            return RatFunc::variable(s_.substr(st, i_ - st));
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

inline RatFunc parse_expr(std::string_view s) { return ExprParser(s).parse(); }
inline std::string print_expr(const RatFunc& f) { return f.to_string(); }

}  // namespace qc
