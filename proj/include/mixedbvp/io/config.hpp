#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/error.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/core/problem.hpp"
#include "mixedbvp/geometry/domain.hpp"
#include "mixedbvp/scheme/stencil.hpp"
#include "mixedbvp/solver/solver.hpp"

namespace mixedbvp {

/// Config error tied to one field; `field` is "section.key".
class ConfigError : public Error {
public:
    ConfigError(ErrorCode code, std::string field, const std::string& what)
        : Error(code, what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
    int column = 0;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
};

struct IniDocument {
    std::vector<IniSection> sections;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

[[noreturn]] inline void config_fail(const std::string& source, int line, int column, const std::string& field,
                                     const std::string& msg, ErrorCode code = ErrorCode::ConfigParse) {
    throw ConfigError(code, field, source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg);
}

} // namespace detail

/// Sections in brackets, `key = value` lines, comments starting with # or ;.
inline IniDocument parse_ini(std::string_view text, const std::string& source = "<config>") {
    IniDocument doc;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::size_t cut = raw.size();
        for (std::size_t i = 0; i < raw.size(); ++i)
            if ((raw[i] == '#' || raw[i] == ';') && (i == 0 || raw[i - 1] == ' ' || raw[i - 1] == '\t')) {
                cut = i;
                break;
            }
        const std::string_view body = raw.substr(0, cut);
        const std::string t = detail::trim(body);
        if (t.empty()) continue;
        const int first_col = static_cast<int>(body.find_first_not_of(" \t")) + 1;

        if (t.front() == '[') {
            if (t.back() != ']')
                detail::config_fail(source, line_no, first_col, "", "unterminated section header");
            IniSection s;
            s.name = detail::trim(std::string_view(t).substr(1, t.size() - 2));
            s.line = line_no;
            if (s.name.empty()) detail::config_fail(source, line_no, first_col, "", "empty section name");
            for (const auto& other : doc.sections)
                if (other.name == s.name)
                    detail::config_fail(source, line_no, first_col, s.name, "duplicate section [" + s.name + "]");
            doc.sections.push_back(std::move(s));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            detail::config_fail(source, line_no, first_col, "", "expected 'key = value'");
        if (doc.sections.empty())
            detail::config_fail(source, line_no, first_col, "", "key outside of any section");
        IniEntry e;
        e.key = detail::trim(body.substr(0, eq));
        e.value = detail::trim(body.substr(eq + 1));
        e.line = line_no;
        const std::size_t vstart = body.find_first_not_of(" \t", eq + 1);
        e.column = static_cast<int>(vstart == std::string_view::npos ? eq + 2 : vstart + 1);
        auto& sec = doc.sections.back();
        if (e.key.empty()) detail::config_fail(source, line_no, first_col, sec.name, "empty key");
        for (const auto& other : sec.entries)
            if (other.key == e.key)
                detail::config_fail(source, line_no, first_col, sec.name + "." + e.key, "duplicate key " + e.key);
        sec.entries.push_back(std::move(e));
    }
    return doc;
}

/// Scalar field from a small catalog: constant c, a sin(k pi x) sin(k pi y)
/// (product over axes), or the wedge harmonic a r^e sin(e theta).
struct FieldConfig {
    std::string kind = "constant";
    double value = 0.0;
    double amplitude = 1.0;
    double frequency = 1.0;
    double exponent = 0.5;

    bool operator==(const FieldConfig&) const = default;

    ScalarField build() const {
        if (kind == "constant") return constant_field(value);
        if (kind == "sine") {
            const double a = amplitude, k = frequency * std::numbers::pi;
            return [a, k](const Vec& x) {
                double s = a;
                for (int i = 0; i < x.dim(); ++i) s *= std::sin(k * x[i]);
                return s;
            };
        }
        if (kind == "wedge") {
            const double a = amplitude, e = exponent;
            return [a, e](const Vec& x) {
                const double r = std::hypot(x[0], x[1]);
                if (r == 0.0) return 0.0;
                return a * std::pow(r, e) * std::sin(e * polar_angle(x[0], x[1]));
            };
        }
        fail(ErrorCode::ConfigParse, "unknown field kind " + kind);
    }
};

/// Key positions from the parsed text; ignored by comparisons.
struct ConfigLocations {
    std::string source = "<config>";
    std::map<std::string, std::pair<int, int>> at;

    friend bool operator==(const ConfigLocations&, const ConfigLocations&) { return true; }
};

struct RunConfig {
    // [domain]
    std::string shape = "half_disk";
    double radius = 1.0;
    double theta1 = std::numbers::pi;
    std::vector<double> lo{0.0, 0.0};
    std::vector<double> hi{1.0, 1.0};
    /// rectangle: xmin, xmax, ymin, ymax[, zmin, zmax]; disk: one kind;
    /// sectors: ray0, ray1, arc. Empty means the shape default.
    std::vector<BoundaryKind> boundary;

    // [operator]
    OperatorKind op_kind = OperatorKind::PucciPlus;
    double a = 1.0;
    double big_a = 1.0;
    double alpha = 0.0;

    // [beta]
    std::string beta_kind = "zero";
    double beta_c = 1.0;
    double beta_p = 1.0;
    std::vector<std::pair<double, double>> beta_knots;

    FieldConfig source;
    FieldConfig dirichlet;

    // [grid]
    double h = 1.0 / 32.0;
    int directions = 4;
    GradMode grad_mode = GradMode::Centered;
    double eps_grad = -1.0;

    // [solver]
    SolveMethod method = SolveMethod::GaussSeidel;
    double tol = -1.0;
    long max_iters = 1000000;
    double omega = 0.0;
    bool adaptive_omega = true;
    long stall_window = 10000;

    // [analysis]
    std::vector<double> center{0.0, 0.0};
    double gamma = 0.5;
    std::vector<double> h_list{1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0};
    int pairs = 20;
    std::string exact = "none";
    std::uint64_t seed = 0;

    // [barrier]
    double kappa = 3.0;
    std::vector<double> alphas{-0.5, 0.0, 1.0};
    std::vector<double> nu{0.0, -1.0};
    int r_count = 100;
    int theta_count = 100;
    double r_min = 1e-3;
    double r_max = 1.0;

    ConfigLocations where;

    bool operator==(const RunConfig&) const = default;

    /// "section.key" location prefix for diagnostics, or the source alone.
    std::string locate(const std::string& field) const {
        const auto it = where.at.find(field);
        if (it == where.at.end()) return where.source;
        return where.source + ":" + std::to_string(it->second.first) + ":" + std::to_string(it->second.second);
    }
};

namespace detail {

inline std::string fmt(double v) { return format_double(v); }

inline double parse_atom(const std::string& s, bool& ok) {
    const std::string t = trim(s);
    if (t == "pi") return std::numbers::pi;
    if (t.empty()) {
        ok = false;
        return 0.0;
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) ok = false;
    return v;
}

/// Decimal, "pi", or a quotient of two of those ("1/32", "pi/2").
inline bool parse_number(const std::string& s, double& out) {
    bool ok = true;
    const std::size_t slash = s.find('/');
    if (slash == std::string::npos) {
        out = parse_atom(s, ok);
    } else {
        const double n = parse_atom(s.substr(0, slash), ok);
        const double d = parse_atom(s.substr(slash + 1), ok);
        if (d == 0.0) ok = false;
        out = n / d;
    }
    return ok && std::isfinite(out);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t b = 0;
    while (true) {
        const std::size_t e = s.find(sep, b);
        out.push_back(trim(std::string_view(s).substr(b, e == std::string::npos ? std::string::npos : e - b)));
        if (e == std::string::npos) break;
        b = e + 1;
    }
    return out;
}

inline std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

class Reader {
public:
    Reader(const IniEntry& e, std::string field, const std::string& source)
        : e_(e), field_(std::move(field)), source_(source) {}

    [[noreturn]] void bad(const std::string& what) const {
        config_fail(source_, e_.line, e_.column, field_, field_ + ": " + what + " (got '" + e_.value + "')");
    }

    double number() const {
        double v = 0.0;
        if (!parse_number(e_.value, v)) bad("expected a number");
        return v;
    }
    long integer() const {
        const double v = number();
        if (v != std::floor(v) || std::abs(v) > 9e15) bad("expected an integer");
        return static_cast<long>(v);
    }
    bool boolean() const {
        if (e_.value == "true") return true;
        if (e_.value == "false") return false;
        bad("expected true or false");
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const auto& part : split(e_.value, ',')) {
            double v = 0.0;
            if (!parse_number(part, v)) bad("expected a comma-separated list of numbers");
            out.push_back(v);
        }
        return out;
    }
    const std::string& text() const { return e_.value; }
    std::string choice(std::initializer_list<std::string_view> allowed) const {
        std::string list;
        for (auto a : allowed) {
            if (e_.value == a) return e_.value;
            list += (list.empty() ? "" : ", ") + std::string(a);
        }
        bad("expected one of " + list);
    }

private:
    const IniEntry& e_;
    std::string field_;
    const std::string& source_;
};

inline BoundaryKind parse_boundary_kind(const Reader& r, const std::string& s) {
    if (s == "dirichlet" || s == "D") return BoundaryKind::Dirichlet;
    if (s == "neumann" || s == "N") return BoundaryKind::Neumann;
    r.bad("boundary kinds are dirichlet or neumann");
}

inline void read_field(FieldConfig& f, const std::string& key, const Reader& r) {
    if (key == "kind") f.kind = r.choice({"constant", "sine", "wedge"});
    else if (key == "value") f.value = r.number();
    else if (key == "amplitude") f.amplitude = r.number();
    else if (key == "frequency") f.frequency = r.number();
    else if (key == "exponent") f.exponent = r.number();
    else r.bad("unknown key");
}

} // namespace detail

/// Parses config text. Missing keys keep their defaults; unknown sections
/// or keys and malformed values raise ConfigError(ConfigParse) with
/// "source:line:column" and the field name.
inline RunConfig parse_config(std::string_view text, const std::string& source = "<config>") {
    const IniDocument doc = parse_ini(text, source);
    RunConfig c;
    c.where.source = source;
    for (const auto& sec : doc.sections) {
        const std::string& s = sec.name;
        if (s != "domain" && s != "operator" && s != "beta" && s != "source" && s != "dirichlet" && s != "grid" &&
            s != "solver" && s != "analysis" && s != "barrier")
            detail::config_fail(source, sec.line, 1, s, "unknown section [" + s + "]");
        for (const auto& e : sec.entries) {
            const std::string field = s + "." + e.key;
            c.where.at[field] = {e.line, e.column};
            const detail::Reader r(e, field, source);
            const std::string& k = e.key;
            if (s == "domain") {
                if (k == "shape") c.shape = r.choice({"rectangle", "disk", "disk_sector", "half_disk"});
                else if (k == "radius") c.radius = r.number();
                else if (k == "theta1") c.theta1 = r.number();
                else if (k == "lo") c.lo = r.numbers();
                else if (k == "hi") c.hi = r.numbers();
                else if (k == "boundary") {
                    c.boundary.clear();
                    for (const auto& part : detail::split(e.value, ','))
                        c.boundary.push_back(detail::parse_boundary_kind(r, part));
                } else r.bad("unknown key");
            } else if (s == "operator") {
                if (k == "kind") {
                    const std::string v = r.choice({"pucci_plus", "pucci_minus"});
                    c.op_kind = v == "pucci_plus" ? OperatorKind::PucciPlus : OperatorKind::PucciMinus;
                } else if (k == "a") c.a = r.number();
                else if (k == "A") c.big_a = r.number();
                else if (k == "alpha") c.alpha = r.number();
                else r.bad("unknown key");
            } else if (s == "beta") {
                if (k == "kind") c.beta_kind = r.choice({"zero", "linear", "power", "exp", "table"});
                else if (k == "c") c.beta_c = r.number();
                else if (k == "p") c.beta_p = r.number();
                else if (k == "knots") {
                    c.beta_knots.clear();
                    for (const auto& part : detail::split(e.value, ',')) {
                        const auto colon = part.find(':');
                        double t = 0.0, b = 0.0;
                        if (colon == std::string::npos || !detail::parse_number(part.substr(0, colon), t) ||
                            !detail::parse_number(part.substr(colon + 1), b))
                            r.bad("knots are t:b pairs separated by commas");
                        c.beta_knots.emplace_back(t, b);
                    }
                } else r.bad("unknown key");
            } else if (s == "source") {
                detail::read_field(c.source, k, r);
            } else if (s == "dirichlet") {
                detail::read_field(c.dirichlet, k, r);
            } else if (s == "grid") {
                if (k == "h") c.h = r.number();
                else if (k == "directions") c.directions = static_cast<int>(r.integer());
                else if (k == "grad_mode") c.grad_mode = r.choice({"centered", "upwind"}) == "centered" ? GradMode::Centered : GradMode::Upwind;
                else if (k == "eps_grad") c.eps_grad = r.number();
                else r.bad("unknown key");
            } else if (s == "solver") {
                if (k == "method") c.method = r.choice({"pseudo_time", "gauss_seidel"}) == "pseudo_time" ? SolveMethod::PseudoTime : SolveMethod::GaussSeidel;
                else if (k == "tol") c.tol = r.number();
                else if (k == "max_iters") c.max_iters = r.integer();
                else if (k == "omega") c.omega = r.number();
                else if (k == "adaptive_omega") c.adaptive_omega = r.boolean();
                else if (k == "stall_window") c.stall_window = r.integer();
                else r.bad("unknown key");
            } else if (s == "analysis") {
                if (k == "center") c.center = r.numbers();
                else if (k == "gamma") c.gamma = r.number();
                else if (k == "h_list") c.h_list = r.numbers();
                else if (k == "pairs") c.pairs = static_cast<int>(r.integer());
                else if (k == "exact") c.exact = r.choice({"none", "dirichlet"});
                else if (k == "seed") {
                    const long v = r.integer();
                    if (v < 0) r.bad("seed must be non-negative");
                    c.seed = static_cast<std::uint64_t>(v);
                } else r.bad("unknown key");
            } else if (s == "barrier") {
                if (k == "kappa") c.kappa = r.number();
                else if (k == "alphas") c.alphas = r.numbers();
                else if (k == "nu") c.nu = r.numbers();
                else if (k == "r_count") c.r_count = static_cast<int>(r.integer());
                else if (k == "theta_count") c.theta_count = static_cast<int>(r.integer());
                else if (k == "r_min") c.r_min = r.number();
                else if (k == "r_max") c.r_max = r.number();
                else r.bad("unknown key");
            }
        }
    }
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ErrorCode::ConfigParse, "", path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

/// Canonical text: every key in fixed order, numbers at 17 significant digits.
inline std::string serialize_config(const RunConfig& c) {
    using detail::fmt;
    std::ostringstream o;
    auto field = [&](const char* name, const FieldConfig& f) {
        o << "\n[" << name << "]\n"
          << "kind = " << f.kind << "\n"
          << "value = " << fmt(f.value) << "\n"
          << "amplitude = " << fmt(f.amplitude) << "\n"
          << "frequency = " << fmt(f.frequency) << "\n"
          << "exponent = " << fmt(f.exponent) << "\n";
    };
    o << "[domain]\n"
      << "shape = " << c.shape << "\n"
      << "radius = " << fmt(c.radius) << "\n"
      << "theta1 = " << fmt(c.theta1) << "\n"
      << "lo = " << detail::join(c.lo) << "\n"
      << "hi = " << detail::join(c.hi) << "\n"
      << "boundary = ";
    for (std::size_t i = 0; i < c.boundary.size(); ++i) o << (i ? ", " : "") << to_string(c.boundary[i]);
    o << "\n\n[operator]\n"
      << "kind = " << to_string(c.op_kind) << "\n"
      << "a = " << fmt(c.a) << "\n"
      << "A = " << fmt(c.big_a) << "\n"
      << "alpha = " << fmt(c.alpha) << "\n"
      << "\n[beta]\n"
      << "kind = " << c.beta_kind << "\n"
      << "c = " << fmt(c.beta_c) << "\n"
      << "p = " << fmt(c.beta_p) << "\n"
      << "knots = ";
    for (std::size_t i = 0; i < c.beta_knots.size(); ++i)
        o << (i ? ", " : "") << fmt(c.beta_knots[i].first) << ":" << fmt(c.beta_knots[i].second);
    o << "\n";
    field("source", c.source);
    field("dirichlet", c.dirichlet);
    o << "\n[grid]\n"
      << "h = " << fmt(c.h) << "\n"
      << "directions = " << c.directions << "\n"
      << "grad_mode = " << to_string(c.grad_mode) << "\n"
      << "eps_grad = " << fmt(c.eps_grad) << "\n"
      << "\n[solver]\n"
      << "method = " << to_string(c.method) << "\n"
      << "tol = " << fmt(c.tol) << "\n"
      << "max_iters = " << c.max_iters << "\n"
      << "omega = " << fmt(c.omega) << "\n"
      << "adaptive_omega = " << (c.adaptive_omega ? "true" : "false") << "\n"
      << "stall_window = " << c.stall_window << "\n"
      << "\n[analysis]\n"
      << "center = " << detail::join(c.center) << "\n"
      << "gamma = " << fmt(c.gamma) << "\n"
      << "h_list = " << detail::join(c.h_list) << "\n"
      << "pairs = " << c.pairs << "\n"
      << "exact = " << c.exact << "\n"
      << "seed = " << c.seed << "\n"
      << "\n[barrier]\n"
      << "kappa = " << fmt(c.kappa) << "\n"
      << "alphas = " << detail::join(c.alphas) << "\n"
      << "nu = " << detail::join(c.nu) << "\n"
      << "r_count = " << c.r_count << "\n"
      << "theta_count = " << c.theta_count << "\n"
      << "r_min = " << fmt(c.r_min) << "\n"
      << "r_max = " << fmt(c.r_max) << "\n";
    return o.str();
}

inline Vec to_vec(const std::vector<double>& v) {
    Vec x(static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
    return x;
}

inline DomainSpec build_domain(const RunConfig& c) {
    const auto& b = c.boundary;
    auto kind = [&](std::size_t i, BoundaryKind def) { return i < b.size() ? b[i] : def; };
    auto need = [&](std::initializer_list<std::size_t> counts) {
        if (b.empty()) return;
        for (auto n : counts)
            if (b.size() == n) return;
        throw ConfigError(ErrorCode::ConfigParse, "domain.boundary",
                          c.locate("domain.boundary") + ": domain.boundary has " + std::to_string(b.size()) +
                              " entries, which does not fit shape " + c.shape);
    };
    try {
        if (c.shape == "rectangle") {
            need({4, 6});
            return DomainSpec::rectangle(to_vec(c.lo), to_vec(c.hi), b);
        }
        if (c.shape == "disk") {
            need({1});
            return DomainSpec::disk(c.radius, kind(0, BoundaryKind::Dirichlet));
        }
        need({3});
        if (c.shape == "disk_sector")
            return DomainSpec::disk_sector(c.radius, c.theta1, kind(0, BoundaryKind::Dirichlet),
                                           kind(1, BoundaryKind::Neumann), kind(2, BoundaryKind::Dirichlet));
        return DomainSpec::half_disk(c.radius, kind(0, BoundaryKind::Dirichlet), kind(1, BoundaryKind::Neumann),
                                     kind(2, BoundaryKind::Dirichlet));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.code(), "domain.shape", c.locate("domain.shape") + ": domain: " + e.what());
    }
}

inline Beta build_beta(const RunConfig& c) {
    try {
        if (c.beta_kind == "zero") return Beta::zero();
        if (c.beta_kind == "linear") return Beta::linear(c.beta_c);
        if (c.beta_kind == "power") return Beta::power(c.beta_p, c.beta_c);
        if (c.beta_kind == "exp") return Beta::exp();
        return Beta::table(c.beta_knots);
    } catch (const Error& e) {
        throw ConfigError(e.code(), "beta.kind", c.locate("beta.kind") + ": beta: " + e.what());
    }
}

/// Validated problem; ellipticity, alpha and beta failures name the field.
inline ProblemSpec build_problem(const RunConfig& c, std::uint64_t seed = 0) {
    if (!(c.a > 0.0))
        throw ConfigError(ErrorCode::InvalidEllipticity, "operator.a",
                          c.locate("operator.a") + ": operator.a = " + detail::fmt(c.a) + " must be positive");
    if (!(c.big_a >= c.a))
        throw ConfigError(ErrorCode::InvalidEllipticity, "operator.A",
                          c.locate("operator.A") + ": operator.A = " + detail::fmt(c.big_a) +
                              " must be at least operator.a = " + detail::fmt(c.a));
    if (!(c.alpha > -1.0))
        throw ConfigError(ErrorCode::InvalidAlpha, "operator.alpha",
                          c.locate("operator.alpha") + ": operator.alpha = " + detail::fmt(c.alpha) +
                              " must exceed -1");
    const OperatorSpec op = c.op_kind == OperatorKind::PucciPlus ? OperatorSpec::pucci_plus(c.a, c.big_a, c.alpha)
                                                                 : OperatorSpec::pucci_minus(c.a, c.big_a, c.alpha);
    ProblemSpec p{.domain = build_domain(c),
                  .op = op,
                  .beta = build_beta(c),
                  .f = c.source.build(),
                  .dirichlet_value = c.dirichlet.build()};
    ValidationOptions vo;
    vo.seed = seed;
    try {
        return validate_problem(std::move(p), vo);
    } catch (const Error& e) {
        const std::string field = e.code() == ErrorCode::NonMonotoneBeta ? "beta.kind" : "operator.kind";
        throw ConfigError(e.code(), field, c.locate(field) + ": " + field + ": " + e.what());
    }
}

inline SolveOptions build_solve_options(const RunConfig& c) {
    SolveOptions o;
    o.h = c.h;
    o.tol = c.tol;
    o.max_iters = c.max_iters;
    o.stencil = StencilSpec::with_directions(c.directions, c.grad_mode);
    o.reg.eps_grad = c.eps_grad;
    o.method = c.method;
    o.omega = c.omega;
    o.adaptive_omega = c.adaptive_omega;
    o.stall_window = c.stall_window;
    if (!(c.h > 0.0))
        throw ConfigError(ErrorCode::ConfigParse, "grid.h", c.locate("grid.h") + ": grid.h must be positive");
    return o;
}

} // namespace mixedbvp
