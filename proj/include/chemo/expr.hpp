#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chemo {

/**
 * A scalar function of the radial coordinate s >= 0, given either as a sum
 * of monomials
 *
 *     "0.5 * s^2 + 1.0"      "s"      "2e-3 * s^0.5 - 0.1"
 *
 * or as a piecewise-linear lookup table with strictly increasing abscissae
 *
 *     "table(0:1.0, 0.5:2.0, 1:0.5)"
 *
 * Table evaluation clamps outside the tabulated range. parse() throws
 * std::invalid_argument with a position diagnostic on malformed input.
 */
class RadialFn {
public:
    RadialFn() = default;

    static RadialFn constant(double c) {
        RadialFn f;
        f.terms_.push_back({c, 0.0});
        return f;
    }

    static RadialFn monomial(double coef, double exponent) {
        RadialFn f;
        f.terms_.push_back({coef, exponent});
        return f;
    }

    static RadialFn parse(const std::string& text) {
        Parser p(text);
        return p.run();
    }

    double operator()(double s) const {
        if (table_.empty()) {
            double acc = 0.0;
            for (const auto& t : terms_)
                acc += (t.exponent == 0.0) ? t.coef : t.coef * std::pow(s, t.exponent);
            return acc;
        }
        if (s <= table_.front().first) return table_.front().second;
        if (s >= table_.back().first) return table_.back().second;
        auto hi = std::upper_bound(table_.begin(), table_.end(), s,
                                   [](double x, const std::pair<double, double>& e) { return x < e.first; });
        auto lo = hi - 1;
        const double w = (s - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }

    bool is_table() const { return !table_.empty(); }

    /// Canonical text form; parse(str()) reproduces the function exactly.
    std::string str() const {
        char buf[64];
        std::string out;
        if (!table_.empty()) {
            out = "table(";
            for (std::size_t i = 0; i < table_.size(); ++i) {
                if (i) out += ", ";
                std::snprintf(buf, sizeof buf, "%.17g", table_[i].first);
                out += buf;
                out += ":";
                std::snprintf(buf, sizeof buf, "%.17g", table_[i].second);
                out += buf;
            }
            out += ")";
            return out;
        }
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            double c = terms_[i].coef;
            if (i == 0) {
                if (c < 0.0) { out += "-"; c = -c; }
            } else {
                out += (c < 0.0) ? " - " : " + ";
                if (c < 0.0) c = -c;
            }
            std::snprintf(buf, sizeof buf, "%.17g", c);
            out += buf;
            if (terms_[i].exponent != 0.0) {
                out += " * s^";
                std::snprintf(buf, sizeof buf, "%.17g", terms_[i].exponent);
                out += buf;
            }
        }
        if (out.empty()) out = "0";
        return out;
    }

private:
    struct Term {
        double coef;
        double exponent;
    };

    std::vector<Term> terms_;
    std::vector<std::pair<double, double>> table_;  // sorted by first

    class Parser {
    public:
        explicit Parser(const std::string& text) : s_(text) {}

        RadialFn run() {
            skip_ws();
            if (at_word("table")) return parse_table();
            RadialFn f;
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') sign = (get() == '-') ? -1.0 : 1.0;
            f.terms_.push_back(parse_term(sign));
            skip_ws();
            while (pos_ < s_.size()) {
                char op = get();
                if (op != '+' && op != '-') fail("expected '+' or '-'");
                f.terms_.push_back(parse_term(op == '-' ? -1.0 : 1.0));
                skip_ws();
            }
            return f;
        }

    private:
        const std::string& s_;
        std::size_t pos_ = 0;

        [[noreturn]] void fail(const std::string& what) const {
            throw std::invalid_argument("bad expression \"" + s_ + "\" at position " +
                                        std::to_string(pos_) + ": " + what);
        }

        void skip_ws() {
            while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        }

        char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
        char get() { return pos_ < s_.size() ? s_[pos_++] : '\0'; }

        bool at_word(const char* w) const {
            std::size_t n = std::string(w).size();
            return s_.compare(pos_, n, w) == 0;
        }

        double parse_number() {
            skip_ws();
            const char* start = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) fail("expected a number");
            pos_ += static_cast<std::size_t>(end - start);
            return v;
        }

        double parse_exponent() {
            skip_ws();
            if (peek() != '^') return 1.0;
            get();
            return parse_number();
        }

        Term parse_term(double sign) {
            skip_ws();
            if (peek() == 's') {
                get();
                return {sign, parse_exponent()};
            }
            double coef = sign * parse_number();
            skip_ws();
            if (peek() == '*') {
                get();
                skip_ws();
                if (get() != 's') fail("expected 's' after '*'");
                return {coef, parse_exponent()};
            }
            return {coef, 0.0};
        }

        RadialFn parse_table() {
            pos_ += 5;  // "table"
            skip_ws();
            if (get() != '(') fail("expected '(' after table");
            RadialFn f;
            while (true) {
                double s = parse_number();
                skip_ws();
                if (get() != ':') fail("expected ':' in table entry");
                double v = parse_number();
                if (!f.table_.empty() && !(s > f.table_.back().first))
                    fail("table abscissae must be strictly increasing");
                f.table_.emplace_back(s, v);
                skip_ws();
                char c = get();
                if (c == ')') break;
                if (c != ',') fail("expected ',' or ')' in table");
            }
            skip_ws();
            if (pos_ != s_.size()) fail("trailing characters after table");
            if (f.table_.size() < 2) fail("table needs at least two entries");
            return f;
        }
    };
};

}  // namespace chemo
