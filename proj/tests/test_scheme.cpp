#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixedbvp/pucci/pucci.hpp"
#include "mixedbvp/scheme/discretization.hpp"
#include "mixedbvp/scheme/stencil.hpp"

using namespace mixedbvp;
using std::numbers::pi;

namespace {

GridField square_field(double h, double lo = 0.0, double hi = 1.0) {
    return GridField::on_domain(DomainSpec::rectangle(Vec{lo, lo}, Vec{hi, hi}), h);
}

std::size_t node_at(const GridField& u, double x, double y) {
    const GridSpec& g = u.grid;
    return g.index(static_cast<int>(std::lround((x - g.lo[0]) / g.h)), static_cast<int>(std::lround((y - g.lo[1]) / g.h)));
}

ProblemSpec laplace_problem(DomainSpec d) {
    ProblemSpec p{.domain = std::move(d), .op = OperatorSpec::pucci_plus(1.0, 1.0)};
    return p;
}

} // namespace

TEST(Gradient, ExactOnLinearField) {
    auto u = square_field(0.1);
    u.fill([](const Vec& x) { return x[0]; });
    for (GradMode mode : {GradMode::Centered, GradMode::Upwind}) {
        const Vec g = gradient_stencil(u, node_at(u, 0.4, 0.7), mode);
        EXPECT_NEAR(g[0], 1.0, 1e-12);
        EXPECT_NEAR(g[1], 0.0, 1e-12);
    }
}

TEST(Gradient, ZeroOnConstantField) {
    auto u = square_field(0.1);
    u.fill([](const Vec&) { return 3.5; });
    const Vec g = gradient_stencil(u, node_at(u, 0.5, 0.5));
    EXPECT_EQ(g[0], 0.0);
    EXPECT_EQ(g[1], 0.0);
}

TEST(Gradient, CentredExactOnQuadratic) {
    auto u = square_field(0.1);
    u.fill([](const Vec& x) { return x[0] * x[0]; });
    const Vec g = gradient_stencil(u, node_at(u, 0.5, 0.3));
    EXPECT_NEAR(g[0], 1.0, 1e-12);
}

TEST(Gradient, UpwindPicksOneSidedDifference) {
    auto u = square_field(0.1);
    u.fill([](const Vec& x) { return x[0] * x[0]; });
    // At x = 0.5 the backward difference (0.25 - 0.16)/0.1 = 0.9 is positive and selected.
    const Vec g = gradient_stencil(u, node_at(u, 0.5, 0.3), GradMode::Upwind);
    EXPECT_NEAR(g[0], 0.9, 1e-12);
}

TEST(Gradient, MissingNeighborAtGridEdge) {
    auto u = square_field(0.1);
    try {
        gradient_stencil(u, node_at(u, 0.0, 0.5));
        FAIL() << "expected MissingNeighbor";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingNeighbor);
    }
}

TEST(DiscretePucci, SaddleWithSixteenDirections) {
    auto u = square_field(0.05, -1.0, 1.0);
    u.fill([](const Vec& x) { return 0.5 * (x[0] * x[0] - x[1] * x[1]); });
    const double v = discrete_pucci(u, node_at(u, 0.0, 0.0), 1.0, 2.0, StencilSpec::with_directions(16));
    EXPECT_GE(v, 0.9);
    EXPECT_LE(v, 1.1);
    EXPECT_NEAR(v, pucci_plus(1.0, 2.0, SymMatrix::diag({1.0, -1.0})), 0.1);
}

TEST(DiscretePucci, HalfSquaredNormGivesANForEveryStencil) {
    auto u = square_field(0.05, -1.0, 1.0);
    u.fill([](const Vec& x) { return 0.5 * dot(x, x); });
    const std::size_t c = node_at(u, 0.1, -0.2);
    for (int dc : {4, 8, 16}) {
        const StencilSpec s = StencilSpec::with_directions(dc);
        EXPECT_NEAR(discrete_pucci(u, c, 1.0, 2.0, s), 4.0, 1e-10) << dc;
        EXPECT_NEAR(discrete_pucci(u, c, 1.0, 2.0, s, false), 2.0, 1e-10) << dc;
    }
}

TEST(DiscretePucci, HalfSquaredNormIn3D) {
    auto u = GridField::on_domain(DomainSpec::rectangle(Vec{-1.0, -1.0, -1.0}, Vec{1.0, 1.0, 1.0}), 0.25);
    u.fill([](const Vec& x) { return 0.5 * dot(x, x); });
    const std::size_t c = u.grid.index(4, 4, 4);
    EXPECT_NEAR(discrete_pucci(u, c, 0.5, 1.5, {}), 4.5, 1e-10);
    EXPECT_NEAR(discrete_pucci(u, c, 0.5, 1.5, {}, false), 1.5, 1e-10);
}

TEST(DiscretePucci, ConstantGivesZero) {
    auto u = square_field(0.1);
    u.fill([](const Vec&) { return -2.0; });
    EXPECT_EQ(discrete_pucci(u, node_at(u, 0.5, 0.5), 1.0, 3.0, StencilSpec::with_directions(8)), 0.0);
}

TEST(DiscretePucci, WideStencilNeedsReach) {
    auto u = square_field(0.1);
    StencilSpec s;
    s.direction_count = 8;
    s.reach = 1;
    EXPECT_THROW(discrete_pucci(u, node_at(u, 0.5, 0.5), 1.0, 2.0, s), Error);
}

TEST(Boundary, NeumannGhostIsMirrorValue) {
    ProblemSpec p = laplace_problem(DomainSpec::rectangle(
        Vec{0.0, 0.0}, Vec{1.0, 1.0},
        {BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Dirichlet}));
    p.dirichlet_value = [](const Vec& x) { return x[0] * x[0]; };
    const auto disc = Discretization::on_grid(p, 0.1);
    GridField u = disc.make_field();
    u.fill([](const Vec& x) { return x[0] * x[0]; });
    for (double x : {0.2, 0.5, 0.8}) {
        const std::size_t i = node_at(u, x, 0.0);
        ASSERT_EQ(u.node_class[i], NodeClass::NeumannBdry);
        const double up = disc.arm_value(u, i, 1, 0), down = disc.arm_value(u, i, 1, 1);
        EXPECT_NEAR(down, u[node_at(u, x, 0.1)], 1e-14);
        EXPECT_NEAR(up - down, 0.0, 1e-14);
    }
}

TEST(Boundary, DirichletNodesPinned) {
    ProblemSpec p = laplace_problem(DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}));
    GridField u = GridField::on_domain(p.domain, 0.1, 7.0);
    u = apply_boundary(u, p);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u.node_class[i] == NodeClass::DirichletBdry) {
            EXPECT_EQ(u[i], 0.0);
        } else if (u.node_class[i] == NodeClass::Interior) {
            EXPECT_EQ(u[i], 7.0);
        }
    }
}

TEST(Boundary, WedgeAtOriginPinnedToDatum) {
    ProblemSpec p = laplace_problem(DomainSpec::half_disk(1.0));
    p.dirichlet_value = [](const Vec& x) { return 0.25 + x[0]; };
    const auto disc = Discretization::on_grid(p, 1.0 / 16);
    GridField u(disc.grid(), disc.classes(), 5.0);
    disc.apply_boundary(u);
    const std::size_t o = node_at(u, 0.0, 0.0);
    EXPECT_EQ(u.node_class[o], NodeClass::WedgeBdry);
    EXPECT_DOUBLE_EQ(u[o], 0.25);
}

TEST(Boundary, UnclassifiedFieldRejected) {
    ProblemSpec p = laplace_problem(DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}));
    GridField bare;
    bare.grid = GridSpec::covering(Vec{0.0, 0.0}, Vec{1.0, 1.0}, 0.5);
    bare.values.assign(bare.grid.size(), 0.0);
    try {
        apply_boundary(bare, p);
        FAIL() << "expected UnclassifiedNode";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnclassifiedNode);
    }
}

TEST(Residual, ExactOnQuadraticSquare) {
    ProblemSpec p = laplace_problem(DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}));
    const auto q = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
    p.dirichlet_value = q;
    p.f = constant_field(-4.0);
    GridField u = GridField::on_domain(p.domain, 1.0 / 16);
    u.fill(q);
    const GridField r = residual(u, p);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r[i], 0.0, 1e-10);
}

TEST(Residual, ExactOnQuadraticWithCurvedDirichletBoundary) {
    ProblemSpec p = laplace_problem(DomainSpec::disk(1.0));
    const auto q = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
    p.dirichlet_value = q;
    p.f = constant_field(-4.0);
    const auto disc = Discretization::on_grid(p, 0.07);
    GridField u = disc.make_field();
    u.fill(q);
    const GridField r = disc.residual(u);
    for (std::size_t i : disc.active_nodes()) EXPECT_NEAR(r[i], 0.0, 1e-8);
}

TEST(Residual, ZeroFieldZeroSource) {
    ProblemSpec p = laplace_problem(DomainSpec::half_disk(1.0));
    p.beta = Beta::linear();
    GridField u = GridField::on_domain(p.domain, 0.1);
    const GridField r = residual(u, p);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (u.node_class[i] != NodeClass::Exterior) {
            EXPECT_EQ(r[i], 0.0);
        }
}

TEST(Residual, ZeroFieldUnitSource) {
    ProblemSpec p = laplace_problem(DomainSpec::half_disk(1.0));
    p.f = constant_field(1.0);
    GridField u = GridField::on_domain(p.domain, 0.1);
    const GridField r = residual(u, p);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const NodeClass c = u.node_class[i];
        if (is_active(c)) {
            EXPECT_EQ(r[i], 1.0);
        } else if (is_pinned(c)) {
            EXPECT_EQ(r[i], 0.0);
        } else {
            EXPECT_TRUE(std::isnan(r[i]));
        }
    }
}

TEST(Residual, EpsZeroRejectedForSingularOperators) {
    Regularization reg;
    reg.eps_grad = 0.0;
    EXPECT_THROW(check_regularization(reg, -0.5), Error);
    EXPECT_NO_THROW(check_regularization(reg, 0.0));
    EXPECT_NO_THROW(check_regularization(reg, 1.0));
}

TEST(Residual, CustomOperatorFlaggedExperimental) {
    ProblemSpec p{.domain = DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}), .op = OperatorSpec::make_custom([](const Vec&, const Vec&, const SymMatrix& m) { return m.trace(); }, 1.0, 1.0)};
    const auto disc = Discretization::on_grid(p, 0.25);
    EXPECT_TRUE(disc.experimental());
    const auto lap = Discretization::on_grid(laplace_problem(p.domain), 0.25);
    EXPECT_FALSE(lap.experimental());
    GridField u = disc.make_field();
    u.fill([](const Vec& x) { return x[0] * (1.0 - x[0]) + x[1] * x[1]; });
    const GridField r1 = disc.residual(u), r2 = lap.residual(u);
    for (std::size_t i : disc.active_nodes()) EXPECT_NEAR(r1[i], r2[i], 1e-10);
}

TEST(Monotonicity, RaisingNeighboursNeverLowersResidual) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(-1.0, 1.0), bump(0.0, 0.5);
    for (bool plus : {true, false}) {
        for (int dc : {4, 8}) {
            ProblemSpec p{.domain = DomainSpec::half_disk(1.0), .op = plus ? OperatorSpec::pucci_plus(1.0, 3.0) : OperatorSpec::pucci_minus(1.0, 3.0)};
            p.beta = Beta::linear();
            p.f = [](const Vec& x) { return std::sin(4.0 * x[0]); };
            const auto disc = Discretization::on_grid(p, 0.1, StencilSpec::with_directions(dc));
            int checked = 0;
            for (int trial = 0; trial < 20; ++trial) {
                GridField u = disc.make_field();
                for (std::size_t i : disc.active_nodes()) u[i] = val(rng);
                GridField v = u;
                for (std::size_t i : disc.active_nodes()) v[i] += bump(rng);
                for (std::size_t i : disc.active_nodes()) {
                    GridField w = v;
                    w[i] = u[i];
                    EXPECT_GE(disc.node_residual(w, i), disc.node_residual(u, i) - 1e-12);
                    ++checked;
                }
            }
            EXPECT_GT(checked, 1000);
        }
    }
}

TEST(Monotonicity, ResidualDecreasesInOwnValue) {
    ProblemSpec p{.domain = DomainSpec::half_disk(1.0), .op = OperatorSpec::pucci_plus(1.0, 2.0)};
    p.beta = Beta::linear();
    const auto disc = Discretization::on_grid(p, 0.1, StencilSpec::with_directions(8));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    GridField u = disc.make_field();
    for (std::size_t i : disc.active_nodes()) u[i] = val(rng);
    for (std::size_t i : disc.active_nodes()) {
        const LocalNode L = disc.local(u, i);
        EXPECT_LT(disc.local_residual(L, 0.1), disc.local_residual(L, 0.0));
    }
}

TEST(Consistency, FirstOrderRateOnThreeGrids) {
    // Hessian diag(-sin x, cosh y) is axis aligned, so the frame maximum attains
    // the continuum Pucci value; the gradient never vanishes.
    const auto u_exact = [](const Vec& x) { return std::sin(x[0]) + std::cosh(x[1]) + 2.0 * x[0]; };
    const auto lhs = [](const Vec& x) {
        const double gx = std::cos(x[0]) + 2.0, gy = std::sinh(x[1]);
        const double g = std::sqrt(gx * gx + gy * gy);
        return g * pucci_plus(1.0, 2.0, SymMatrix::diag({-std::sin(x[0]), std::cosh(x[1])}));
    };
    ProblemSpec p{.domain = DomainSpec::rectangle(Vec{-1.0, -1.0}, Vec{1.0, 1.0}), .op = OperatorSpec::pucci_plus(1.0, 2.0, 1.0)};
    p.dirichlet_value = u_exact;
    std::vector<double> err;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const auto disc = Discretization::on_grid(p, h, StencilSpec::with_directions(8));
        GridField u = disc.make_field();
        u.fill(u_exact);
        const GridField r = disc.residual(u);
        double e = 0.0;
        for (std::size_t i : disc.active_nodes()) {
            const Vec x = u.coord(i);
            if (std::abs(x[0]) <= 0.5 && std::abs(x[1]) <= 0.5) e = std::max(e, std::abs(r[i] - lhs(x)));
        }
        err.push_back(e);
    }
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GE(std::log2(err[k - 1] / err[k]), 1.0) << k;
}

TEST(Consistency, LaplacianOnCurvedDirichletBoundary) {
    // Rows with full arms are second order. Rows with shortened arms satisfy the
    // three-point bound h/3 |s+ - s-| max|d3u| + h^2/12 max|d4u| per axis.
    const auto u_exact = [](const Vec& x) { return std::sin(pi * x[0]) * std::exp(x[1]); };
    const double e = std::exp(1.0);
    const double m3[2] = {pi * pi * pi * e, e}, m4[2] = {pi * pi * pi * pi * e, e};
    ProblemSpec p = laplace_problem(DomainSpec::disk(1.0));
    p.dirichlet_value = u_exact;
    std::vector<double> err;
    for (double h : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const auto disc = Discretization::on_grid(p, h);
        GridField u = disc.make_field();
        u.fill(u_exact);
        const GridField r = disc.residual(u);
        double full = 0.0;
        int shortened = 0;
        for (std::size_t i : disc.active_nodes()) {
            const Vec x = u.coord(i);
            const double ei = std::abs(r[i] - (1.0 - pi * pi) * u_exact(x));
            double bound = 0.0;
            bool all_full = true;
            for (int k = 0; k < 2; ++k) {
                const double sp = disc.arm_fraction(i, k, 0), sm = disc.arm_fraction(i, k, 1);
                all_full = all_full && sp == 1.0 && sm == 1.0;
                bound += h / 3.0 * std::abs(sp - sm) * m3[k] + h * h / 12.0 * m4[k];
            }
            if (all_full) {
                full = std::max(full, ei);
            } else {
                ++shortened;
                EXPECT_LE(ei, bound) << h << " " << x[0] << " " << x[1];
            }
        }
        EXPECT_GT(shortened, 0);
        err.push_back(full);
    }
    for (std::size_t k = 1; k < err.size(); ++k) EXPECT_GE(std::log2(err[k - 1] / err[k]), 1.0) << k;
}

TEST(Reflection, EvenFieldsMatchFullSpaceRows) {
    const auto even = [](const Vec& x) { return std::cos(2.0 * x[0]) * std::cosh(x[1]) + x[1] * x[1]; };
    for (int dc : {4, 8}) {
        ProblemSpec p{.domain = DomainSpec::rectangle(
            Vec{0.0, 0.0}, Vec{1.0, 1.0},
            {BoundaryKind::Dirichlet, BoundaryKind::Dirichlet, BoundaryKind::Neumann, BoundaryKind::Dirichlet}), .op = OperatorSpec::pucci_plus(1.0, 2.0)};
        p.dirichlet_value = even;
        const StencilSpec s = StencilSpec::with_directions(dc);
        const auto disc = Discretization::on_grid(p, 0.1, s);
        GridField u = disc.make_field();
        u.fill(even);
        const GridField r = disc.residual(u);

        GridField full = square_field(0.1, -1.0, 1.0);
        full.fill(even);
        int rows = 0;
        for (std::size_t i : disc.active_nodes()) {
            const Vec x = u.coord(i);
            if (u.node_class[i] != NodeClass::NeumannBdry || x[0] < 0.25 || x[0] > 0.75) continue;
            const double ref = discrete_pucci(full, node_at(full, x[0], x[1]), 1.0, 2.0, s);
            EXPECT_NEAR(r[i], ref, 1e-9) << x[0];
            ++rows;
        }
        EXPECT_GE(rows, 5);
    }
}

TEST(Discretization, RejectsForeignField) {
    ProblemSpec p = laplace_problem(DomainSpec::rectangle(Vec{0.0, 0.0}, Vec{1.0, 1.0}));
    const auto disc = Discretization::on_grid(p, 0.1);
    const GridField other = square_field(0.2);
    try {
        disc.residual(other);
        FAIL() << "expected GridMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::GridMismatch);
    }
}
