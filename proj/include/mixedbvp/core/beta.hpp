#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mixedbvp/core/error.hpp"

namespace mixedbvp {

/// The zero-order term beta(t), chosen from a small catalog.
///
/// `strictly_increasing` is declared, not inferred: the comparison
/// principle needs either a strict beta or strictly ordered sources and
/// samples cannot tell the two apart.
class Beta {
public:
    enum class Kind { Zero, Linear, Power, Exp, Table, Custom };

    static Beta zero() { return Beta(Kind::Zero, 0.0, 0.0, false); }

    /// c t
    static Beta linear(double c = 1.0) { return Beta(Kind::Linear, c, 1.0, c > 0.0); }

    /// c |t|^(p-1) t, p > 0
    static Beta power(double p, double c = 1.0) {
        require(p > 0.0, ErrorCode::InvalidArgument, "power beta needs p > 0");
        return Beta(Kind::Power, c, p, c > 0.0);
    }

    /// e^t - 1
    static Beta exp() { return Beta(Kind::Exp, 1.0, 0.0, true); }

    /// Piecewise linear through (t_i, b_i), extended linearly past the ends.
    static Beta table(std::vector<std::pair<double, double>> knots) {
        require(knots.size() >= 2, ErrorCode::InvalidArgument, "table beta needs two knots");
        std::sort(knots.begin(), knots.end());
        bool strict = true;
        for (std::size_t i = 1; i < knots.size(); ++i) {
            require(knots[i].first > knots[i - 1].first, ErrorCode::InvalidArgument,
                    "table beta knots must be distinct");
            if (knots[i].second <= knots[i - 1].second) strict = false;
        }
        Beta b(Kind::Table, 1.0, 0.0, strict);
        b.knots_ = std::move(knots);
        return b;
    }

    static Beta custom(std::function<double(double)> fn, bool strictly_increasing,
                       std::string label = "custom") {
        Beta b(Kind::Custom, 1.0, 0.0, strictly_increasing);
        b.fn_ = std::move(fn);
        b.label_ = std::move(label);
        return b;
    }

    Kind kind() const { return kind_; }
    bool strictly_increasing() const { return strict_; }
    bool is_zero() const { return kind_ == Kind::Zero || (kind_ != Kind::Custom && kind_ != Kind::Table &&
                                                        kind_ != Kind::Exp && coef_ == 0.0); }
    double coefficient() const { return coef_; }
    double exponent() const { return exponent_; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }
    const std::string& label() const { return label_; }

    double operator()(double t) const {
        switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return coef_ * t;
        case Kind::Power: return coef_ * std::pow(std::abs(t), exponent_ - 1.0) * t;
        case Kind::Exp: return std::expm1(t);
        case Kind::Table: return table_eval(t).first;
        case Kind::Custom: return fn_(t);
        }
        return 0.0;
    }

    /// d beta / dt; a centered secant for custom callbacks.
    double derivative(double t) const {
        switch (kind_) {
        case Kind::Zero: return 0.0;
        case Kind::Linear: return coef_;
        case Kind::Power:
            if (t == 0.0) return exponent_ > 1.0 ? 0.0 : (exponent_ == 1.0 ? coef_ : 1e300);
            return coef_ * exponent_ * std::pow(std::abs(t), exponent_ - 1.0);
        case Kind::Exp: return std::exp(t);
        case Kind::Table: return table_eval(t).second;
        case Kind::Custom: {
            const double h = 1e-6 * (1.0 + std::abs(t));
            return (fn_(t + h) - fn_(t - h)) / (2.0 * h);
        }
        }
        return 0.0;
    }

    /// Secant slope (beta(s) - beta(t)) / (s - t), falling back to the
    /// derivative when s == t.
    double secant(double t, double s) const {
        if (s == t) return derivative(t);
        return ((*this)(s) - (*this)(t)) / (s - t);
    }

    /// Catalog text: "zero", "linear c", "power p c", "exp", "table t:b,t:b".
    std::string describe() const;

private:
    Beta(Kind k, double c, double p, bool strict) : kind_(k), coef_(c), exponent_(p), strict_(strict) {}

    std::pair<double, double> table_eval(double t) const {
        const auto& k = knots_;
        std::size_t i = 1;
        while (i + 1 < k.size() && t > k[i].first) ++i;
        const double slope = (k[i].second - k[i - 1].second) / (k[i].first - k[i - 1].first);
        return {k[i - 1].second + slope * (t - k[i - 1].first), slope};
    }

    Kind kind_;
    double coef_;
    double exponent_;
    bool strict_;
    std::vector<std::pair<double, double>> knots_;
    std::function<double(double)> fn_;
    std::string label_ = {};
};

namespace detail {
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}
} // namespace detail

inline std::string Beta::describe() const {
    using detail::format_double;
    switch (kind_) {
    case Kind::Zero: return "zero";
    case Kind::Linear: return "linear " + format_double(coef_);
    case Kind::Power: return "power " + format_double(exponent_) + " " + format_double(coef_);
    case Kind::Exp: return "exp";
    case Kind::Table: {
        std::string s = "table ";
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            if (i) s += ",";
            s += format_double(knots_[i].first) + ":" + format_double(knots_[i].second);
        }
        return s;
    }
    case Kind::Custom: return label_;
    }
    return "?";
}

} // namespace mixedbvp
