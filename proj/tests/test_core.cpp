#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mixedbvp/core/beta.hpp"
#include "mixedbvp/core/grid.hpp"
#include "mixedbvp/core/linalg.hpp"
#include "mixedbvp/core/operator.hpp"
#include "mixedbvp/core/problem.hpp"
#include "mixedbvp/core/report.hpp"
#include "mixedbvp/io/config.hpp"
#include "mixedbvp/io/csv.hpp"
#include "mixedbvp/io/json.hpp"

using namespace mixedbvp;

namespace {

template <class F>
ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::InvalidArgument;
}

ProblemSpec accepted_problem() {
    return ProblemSpec{.domain = DomainSpec::half_disk(1.0),
                       .op = OperatorSpec::pucci_plus(1.0, 2.0, 0.0),
                       .beta = Beta::linear(1.0),
                       .f = constant_field(0.0),
                       .dirichlet_value = constant_field(0.0)};
}

} // namespace

TEST(SymMatrix, DimensionMustBeTwoOrThree) {
    EXPECT_EQ(code_of([] { SymMatrix m(4); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { Vec v(1); }), ErrorCode::InvalidArgument);
}

TEST(SymMatrix, StoresUpperTriangleSymmetrically) {
    SymMatrix m(3);
    m.set(0, 2, 5.0);
    EXPECT_EQ(m(2, 0), 5.0);
    EXPECT_EQ(m(0, 2), 5.0);
    m.set(2, 1, -1.5);
    EXPECT_EQ(m(1, 2), -1.5);
}

TEST(Beta, CatalogValues) {
    EXPECT_EQ(Beta::zero()(3.0), 0.0);
    EXPECT_DOUBLE_EQ(Beta::linear(2.0)(1.5), 3.0);
    EXPECT_DOUBLE_EQ(Beta::power(3.0, 1.0)(-2.0), -8.0);
    EXPECT_DOUBLE_EQ(Beta::exp()(1.0), std::exp(1.0) - 1.0);
    const Beta t = Beta::table({{-1.0, -2.0}, {0.0, 0.0}, {1.0, 1.0}});
    EXPECT_DOUBLE_EQ(t(0.5), 0.5);
    EXPECT_DOUBLE_EQ(t(-0.5), -1.0);
}

TEST(Beta, StrictnessFlag) {
    EXPECT_FALSE(Beta::zero().strictly_increasing());
    EXPECT_TRUE(Beta::linear(1.0).strictly_increasing());
    EXPECT_TRUE(Beta::exp().strictly_increasing());
    EXPECT_FALSE(Beta::table({{0.0, 0.0}, {1.0, 0.0}, {2.0, 1.0}}).strictly_increasing());
}

TEST(ValidateProblem, AcceptsPucciPlusWithLinearBeta) {
    const ProblemSpec p = validate_problem(accepted_problem());
    EXPECT_EQ(p.op.kind, OperatorKind::PucciPlus);
    EXPECT_EQ(p.op.a, 1.0);
    EXPECT_EQ(p.op.big_a, 2.0);
    EXPECT_TRUE(p.verified.has_value());
}

TEST(ValidateProblem, RejectsUpperBelowLower) {
    ProblemSpec p = accepted_problem();
    p.op.big_a = 0.5;
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::InvalidEllipticity);
}

TEST(ValidateProblem, RejectsNonPositiveLower) {
    ProblemSpec p = accepted_problem();
    p.op.a = 0.0;
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::InvalidEllipticity);
}

TEST(ValidateProblem, RejectsAlphaMinusOne) {
    ProblemSpec p = accepted_problem();
    p.op.alpha = -1.0;
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::InvalidAlpha);
}

TEST(ValidateProblem, RejectsDecreasingBeta) {
    ProblemSpec p = accepted_problem();
    p.beta = Beta::custom([](double t) { return -t; }, false, "minus t");
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::NonMonotoneBeta);
    p.beta = Beta::linear(-1.0);
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::NonMonotoneBeta);
}

TEST(ValidateProblem, RejectsBetaNotVanishingAtZero) {
    ProblemSpec p = accepted_problem();
    p.beta = Beta::custom([](double t) { return t + 1.0; }, true, "shifted");
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::NonMonotoneBeta);
}

TEST(ValidateProblem, RejectsNonFiniteSource) {
    ProblemSpec p = accepted_problem();
    p.f = [](const Vec& x) { return 1.0 / (x[0] - 0.0); };
    EXPECT_EQ(code_of([&] { validate_problem(p); }), ErrorCode::InvalidArgument);
}

TEST(ValidateProblem, Idempotent) {
    const ProblemSpec once = validate_problem(accepted_problem());
    const ProblemSpec twice = validate_problem(once);
    EXPECT_EQ(once.op.a, twice.op.a);
    EXPECT_EQ(once.op.big_a, twice.op.big_a);
    EXPECT_EQ(once.op.alpha, twice.op.alpha);
    EXPECT_EQ(once.beta.describe(), twice.beta.describe());
    ASSERT_TRUE(once.verified && twice.verified);
    EXPECT_EQ(once.verified->h1_pass, twice.verified->h1_pass);
    EXPECT_EQ(once.verified->worst_violation, twice.verified->worst_violation);
}

TEST(ValidateProblem, CustomOperatorRecordsHypotheses) {
    ProblemSpec p = accepted_problem();
    p.op = OperatorSpec::make_custom([](const Vec&, const Vec&, const SymMatrix& m) { return m.trace(); }, 1.0, 1.0);
    const ProblemSpec v = validate_problem(p);
    ASSERT_TRUE(v.verified);
    EXPECT_TRUE(v.verified->h1_pass && v.verified->h2_pass && v.verified->h3_pass && v.verified->h4_pass);
}

TEST(GridField, NonExteriorNodesFiniteAndWedgesNearBothKinds) {
    const DomainSpec d = DomainSpec::half_disk(1.0);
    const double h = 1.0 / 16.0;
    const GridField u = GridField::on_domain(d, h, 0.0);
    EXPECT_TRUE(u.finite());
    int wedges = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node_class[i] != NodeClass::WedgeBdry) continue;
        ++wedges;
        const Vec x = u.coord(i);
        EXPECT_LE(d.distance_to_kind(x, BoundaryKind::Dirichlet), h) << "wedge node " << i;
        EXPECT_LE(d.distance_to_kind(x, BoundaryKind::Neumann), h) << "wedge node " << i;
    }
    EXPECT_EQ(wedges, 2);
}

TEST(SolveReport, TrailingWindow) {
    SolveReport r;
    r.residual_history = {8, 7, 6, 5, 4, 3, 2, 1};
    EXPECT_TRUE(r.trailing_window_decreasing(4));
    r.residual_history = {1, 1, 1, 1, 9, 1, 1, 1};
    EXPECT_FALSE(r.trailing_window_decreasing(4));
}

namespace {

const char* kProductSyntax = R"([domain]
shape = disk_sector
radius = 2
theta1 = 3*pi
boundary = dirichlet, neumann, neumann
)";

RunConfig nondefault_config() {
    RunConfig c;
    c.shape = "rectangle";
    c.radius = 0.75;
    c.theta1 = 2.5;
    c.lo = {-1.0, 0.0, 0.1};
    c.hi = {1.0, 1.0 / 3.0, 2.0};
    c.boundary = {BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Neumann,
                  BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Neumann};
    c.op_kind = OperatorKind::PucciMinus;
    c.a = 0.3;
    c.big_a = 1.7;
    c.alpha = -0.25;
    c.beta_kind = "table";
    c.beta_c = 0.1;
    c.beta_p = 2.5;
    c.beta_knots = {{-1.0, -0.5}, {0.0, 0.0}, {2.0, 1.0 / 7.0}};
    c.source = FieldConfig{"sine", 0.2, 3.0, 2.0, 0.25};
    c.dirichlet = FieldConfig{"wedge", -1.0, 0.5, 4.0, 2.0 / 3.0};
    c.h = 1.0 / 48.0;
    c.directions = 8;
    c.grad_mode = GradMode::Upwind;
    c.eps_grad = 1e-3;
    c.method = SolveMethod::PseudoTime;
    c.tol = 1e-9;
    c.max_iters = 1234;
    c.omega = 1.3;
    c.adaptive_omega = false;
    c.stall_window = 77;
    c.center = {0.5, 0.25};
    c.gamma = 0.4;
    c.h_list = {0.5, 0.25, 0.125, 0.0625};
    c.pairs = 3;
    c.exact = "dirichlet";
    c.seed = 99;
    c.kappa = 4.5;
    c.alphas = {0.5};
    c.nu = {0.1, -1.0};
    c.r_count = 11;
    c.theta_count = 13;
    c.r_min = 1e-4;
    c.r_max = 0.9;
    return c;
}

} // namespace

TEST(Config, RoundTripIsIdentityOnAllFields) {
    for (const RunConfig& c : {RunConfig{}, nondefault_config()}) {
        const std::string text = serialize_config(c);
        const RunConfig back = parse_config(text);
        EXPECT_TRUE(back == c);
        EXPECT_EQ(serialize_config(back), text);
    }
}

TEST(Config, NondefaultFieldsSurviveIndividually) {
    const RunConfig c = nondefault_config();
    const RunConfig back = parse_config(serialize_config(c));
    EXPECT_EQ(back.lo, c.lo);
    EXPECT_EQ(back.hi[1], 1.0 / 3.0);
    EXPECT_EQ(back.beta_knots, c.beta_knots);
    EXPECT_EQ(back.source, c.source);
    EXPECT_EQ(back.dirichlet.exponent, 2.0 / 3.0);
    EXPECT_EQ(back.h, 1.0 / 48.0);
    EXPECT_EQ(back.grad_mode, GradMode::Upwind);
    EXPECT_EQ(back.method, SolveMethod::PseudoTime);
    EXPECT_FALSE(back.adaptive_omega);
    EXPECT_EQ(back.seed, 99u);
}

TEST(Config, FractionsAndPi) {
    const RunConfig c = parse_config("[grid]\nh = 1/32\n[domain]\ntheta1 = pi/2\n");
    EXPECT_EQ(c.h, 1.0 / 32.0);
    EXPECT_EQ(c.theta1, std::numbers::pi / 2.0);
}

TEST(Config, CommentsAndMissingKeysKeepDefaults) {
    const RunConfig c = parse_config("# header\n[operator] ; trailing\nA = 2 # upper\n\n");
    EXPECT_EQ(c.big_a, 2.0);
    EXPECT_EQ(c.a, 1.0);
    EXPECT_EQ(c.shape, "half_disk");
}

TEST(Config, DiagnosticsCarryLineAndColumn) {
    try {
        parse_config("[grid]\nh = 1/32\ndirections =  eight\n", "x.cfg");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigParse);
        EXPECT_EQ(e.field(), "grid.directions");
        EXPECT_NE(std::string(e.what()).find("x.cfg:3:15"), std::string::npos) << e.what();
    }
    try {
        parse_config("[grid]\nh = 1\n[colour]\n", "y.cfg");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("y.cfg:3:1"), std::string::npos) << e.what();
    }
    EXPECT_EQ(code_of([] { parse_config("[grid]\nspacing = 1\n"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_config("h = 1\n"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_config("[grid\nh = 1\n"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_config("[grid]\nh = 1\nh = 2\n"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_config("[grid]\nh = 1/0\n"); }), ErrorCode::ConfigParse);
    EXPECT_EQ(code_of([] { parse_config(kProductSyntax); }), ErrorCode::ConfigParse);
}

TEST(Config, BuildProblemNamesTheField) {
    RunConfig c = parse_config("[operator]\na = 1\nA = 0.5\n", "bad.cfg");
    try {
        build_problem(c);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidEllipticity);
        EXPECT_EQ(e.field(), "operator.A");
        EXPECT_NE(std::string(e.what()).find("bad.cfg:3:5"), std::string::npos) << e.what();
    }
    c = parse_config("[operator]\nalpha = -1\n");
    EXPECT_EQ(code_of([&] { build_problem(c); }), ErrorCode::InvalidAlpha);
    c = parse_config("[beta]\nkind = table\nknots = 0:0, 1:-1\n");
    EXPECT_EQ(code_of([&] { build_problem(c); }), ErrorCode::NonMonotoneBeta);
}

TEST(Config, BuildProblemMatchesCatalog) {
    const RunConfig c =
        parse_config("[beta]\nkind = power\np = 3\nc = 2\n[dirichlet]\nkind = wedge\nexponent = 0.5\n[source]\nkind = sine\n"
                     "amplitude = 2\nfrequency = 1\n");
    const ProblemSpec p = build_problem(c);
    EXPECT_DOUBLE_EQ(p.beta(2.0), 16.0);
    EXPECT_NEAR(p.dirichlet_value(Vec{0.0, 0.25}), 0.5 * std::sin(std::numbers::pi / 4.0), 1e-15);
    EXPECT_NEAR(p.f(Vec{0.5, 0.5}), 2.0, 1e-15);
    EXPECT_EQ(p.domain.shape(), ShapeKind::HalfDisk);
}

TEST(Csv, SeventeenSignificantDigits) {
    EXPECT_EQ(csv_double(0.1), "0.10000000000000001");
    EXPECT_EQ(std::stod(csv_double(1.0 / 3.0)), 1.0 / 3.0);
    GridField u = GridField::on_domain(DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}), 0.5, 1.0 / 3.0);
    std::ostringstream out;
    write_field_csv(out, u);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,y,u,node_class");
    std::getline(in, line);
    EXPECT_EQ(line, "0,0,0.33333333333333331,dirichlet");
}

TEST(Json, NonFiniteBecomesNull) {
    EXPECT_TRUE(json_number(std::numeric_limits<double>::quiet_NaN()).is_null());
    EXPECT_TRUE(json_number(std::numeric_limits<double>::infinity()).is_null());
    EXPECT_EQ(json_number(0.5).get<double>(), 0.5);
    BarrierCertificate c;
    c.min_margin_value = std::numeric_limits<double>::infinity();
    const Json j = to_json(c);
    EXPECT_TRUE(j["min_margin_value"].is_null());
    EXPECT_TRUE(j["witness"].is_null());
}
