#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "evoflow/forms.hpp"

using namespace evoflow::forms;
using Eigen::ArrayXd;
using Eigen::ArrayXXd;

namespace {

OneForm2D sample_form(const Grid2D& g, const std::function<double(double, double)>& a1,
                      const std::function<double(double, double)>& a2)
{
    OneForm2D f;
    f.A1.resize(g.n1(), g.n2());
    f.A2.resize(g.n1(), g.n2());
    for (Eigen::Index i = 0; i < g.n1(); ++i)
        for (Eigen::Index j = 0; j < g.n2(); ++j) {
            f.A1(i, j) = a1(g.xi1[i], g.xi2[j]);
            f.A2(i, j) = a2(g.xi1[i], g.xi2[j]);
        }
    return f;
}

}  // namespace

TEST_CASE("grid validation")
{
    CHECK_THROWS_AS(Grid2D(ArrayXd::LinSpaced(2, 0, 1), ArrayXd::LinSpaced(3, 0, 1)),
                    std::invalid_argument);
    ArrayXd bad(3);
    bad << 0.0, 0.5, 0.5;
    CHECK_THROWS_AS(Grid2D(bad, ArrayXd::LinSpaced(3, 0, 1)), std::invalid_argument);
}

TEST_CASE("commutator of simple forms")
{
    const auto g = Grid2D::uniform(0, 1, 21, 0, 1, 21);

    auto shear = sample_form(g, [](double, double y) { return y; },
                             [](double, double) { return 0.0; });
    const auto k1 = commutator(shear, g);
    CHECK(k1.max_abs == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < 21; ++i)
        for (Eigen::Index j = 0; j < 21; ++j)
            CHECK(std::abs(k1.K(i, j) + 1.0) < 1e-12);

    auto exact = sample_form(g, [](double x, double) { return 2 * x; },
                             [](double, double y) { return 2 * y; });
    CHECK(commutator(exact, g).max_abs < 1e-13);

    auto bilinear = sample_form(g, [](double, double) { return 0.0; },
                                [](double x, double y) { return x * y; });
    const auto k3 = commutator(bilinear, g);
    for (Eigen::Index i = 0; i < 21; ++i)
        for (Eigen::Index j = 0; j < 21; ++j)
            CHECK(std::abs(k3.K(i, j) - g.xi2[j]) < 1e-12);

    OneForm2D mismatched = shear;
    mismatched.A1.resize(5, 5);
    CHECK_THROWS_AS(commutator(mismatched, g), std::invalid_argument);
}

TEST_CASE("commutator converges at second order")
{
    auto a1 = [](double x, double y) { return std::sin(x * y); };
    auto a2 = [](double x, double y) { return std::exp(x) * std::cos(y); };
    auto k_exact = [](double x, double y) {
        return std::exp(x) * std::cos(y) - x * std::cos(x * y);
    };
    double prev = 0.0;
    for (int n : {33, 65, 129}) {
        const auto g = Grid2D::uniform(0, 1, n, 0, 1, n);
        const auto cf = commutator(sample_form(g, a1, a2), g);
        double err = 0.0;
        for (Eigen::Index i = 1; i + 1 < n; ++i)
            for (Eigen::Index j = 1; j + 1 < n; ++j)
                err = std::max(err, std::abs(cf.K(i, j) - k_exact(g.xi1[i], g.xi2[j])));
        if (n > 33) CHECK(err < prev / 3.5);
        prev = err;
    }
}

TEST_CASE("is_closed")
{
    const auto g = Grid2D::uniform(0, 1, 33, 0, 1, 33);
    auto exact = sample_form(g, [](double x, double) { return 2 * x; },
                             [](double, double y) { return 2 * y; });
    CHECK(is_closed(exact, g, 1e-8).first);

    auto shear = sample_form(g, [](double, double y) { return y; },
                             [](double, double) { return 0.0; });
    const auto [closed, max_abs] = is_closed(shear, g, 0.5);
    CHECK_FALSE(closed);
    CHECK(max_abs == doctest::Approx(1.0).epsilon(1e-12));

    // Reported magnitude is a converged estimate for smooth nonclosed forms.
    auto smooth = [&](int n) {
        const auto gg = Grid2D::uniform(0, 1, n, 0, 1, n);
        return is_closed(sample_form(gg, [](double x, double y) { return std::sin(x + 2 * y); },
                                     [](double x, double y) { return x * y; }),
                         gg, 1e-8)
            .second;
    };
    const double coarse = smooth(65), fine = smooth(129);
    CHECK(std::abs(fine - coarse) / std::abs(fine) < 0.01);
}

TEST_CASE("path integral")
{
    const auto g = Grid2D::uniform(0, 1, 11, 0, 1, 11);
    auto shear = sample_form(g, [](double, double y) { return y; },
                             [](double, double) { return 0.0; });
    const auto loop = GridPath::rectangle(0, 0, 10, 10);
    CHECK(path_integral(shear, g, loop) == doctest::Approx(-1.0).epsilon(1e-12));

    auto exact = sample_form(g, [](double x, double) { return 2 * x; },
                             [](double, double y) { return 2 * y; });
    CHECK(std::abs(path_integral(exact, g, loop)) < 1e-12);

    GridPath open_path;
    for (Eigen::Index i = 0; i <= 10; ++i) open_path.vertices.emplace_back(i, 0);
    for (Eigen::Index j = 1; j <= 10; ++j) open_path.vertices.emplace_back(10, j);
    CHECK(path_integral(exact, g, open_path) == doctest::Approx(2.0).epsilon(1e-12));

    GridPath skips;
    skips.vertices = {{0, 0}, {2, 0}};
    CHECK_THROWS_AS(path_integral(exact, g, skips), std::invalid_argument);
}

TEST_CASE("stokes defect on reference forms")
{
    const auto g = Grid2D::uniform(0, 1, 41, 0, 1, 41);
    const auto loop = GridPath::rectangle(0, 0, 40, 40);

    auto shear = sample_form(g, [](double, double y) { return y; },
                             [](double, double) { return 0.0; });
    CHECK(stokes_defect(shear, g, loop) < 1e-12);
    CHECK(path_integral(shear, g, loop) == doctest::Approx(-1.0));

    auto exact = sample_form(g, [](double x, double) { return 2 * x; },
                             [](double, double y) { return 2 * y; });
    CHECK(stokes_defect(exact, g, loop) < 1e-12);

    auto quad = sample_form(g, [](double, double y) { return y * y; },
                            [](double, double) { return 0.0; });
    CHECK(stokes_defect(quad, g, loop) < 1e-12);
    CHECK(path_integral(quad, g, loop) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("stokes defect is O(h^2) on random rectangles")
{
    auto a1 = [](double x, double y) { return std::sin(2 * x + y); };
    auto a2 = [](double x, double y) { return std::cos(x) * y * y; };
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> pick(0, 9);

    for (int trial = 0; trial < 12; ++trial) {
        int i0 = pick(rng), i1 = pick(rng) + 11, j0 = pick(rng), j1 = pick(rng) + 11;
        double prev = 0.0;
        bool at_floor = false;
        for (int level = 0; level < 2; ++level) {
            const int scale = 1 << level;  // corners live on every grid level
            const int n = 20 * scale + 1;
            const auto g = Grid2D::uniform(0, 1, n, 0, 1, n);
            const auto loop =
                GridPath::rectangle(i0 * scale, j0 * scale, i1 * scale, j1 * scale);
            const double d = stokes_defect(sample_form(g, a1, a2), g, loop);
            if (level > 0) {
                at_floor = prev < 1e-13;
                if (!at_floor) CHECK(d < prev / 3.5);
            }
            prev = d;
        }
    }
}

TEST_CASE("stokes defect orientation and validation")
{
    const auto g = Grid2D::uniform(0, 1, 11, 0, 1, 11);
    auto form = sample_form(g, [](double x, double y) { return std::sin(x + y); },
                            [](double x, double y) { return x * y; });
    const auto ccw = GridPath::rectangle(2, 3, 8, 9);
    GridPath cw;
    cw.vertices.assign(ccw.vertices.rbegin(), ccw.vertices.rend());
    CHECK(stokes_defect(form, g, ccw) == doctest::Approx(stokes_defect(form, g, cw)));

    GridPath open_path;
    open_path.vertices = {{0, 0}, {1, 0}, {2, 0}};
    CHECK_THROWS_AS(stokes_defect(form, g, open_path), std::invalid_argument);

    GridPath degenerate;
    degenerate.vertices = {{0, 0}, {1, 0}, {1, 1}, {1, 0}, {0, 0}};
    CHECK_THROWS_AS(stokes_defect(form, g, degenerate), std::invalid_argument);

    GridPath non_rect;
    non_rect.vertices = {{0, 0}, {1, 0}, {1, 1}, {2, 1}, {2, 2}, {1, 2},
                         {1, 3}, {0, 3}, {0, 2}, {0, 1}, {0, 0}};
    CHECK_THROWS_AS(stokes_defect(form, g, non_rect), std::invalid_argument);
}

TEST_CASE("potential reconstruction of exact forms")
{
    const auto g = Grid2D::uniform(0, 1, 33, 0, 1, 33);
    auto exact = sample_form(g, [](double x, double) { return 2 * x; },
                             [](double, double y) { return 2 * y; });
    const auto res = potential_reconstruct(exact, g, 1e-10);
    REQUIRE(res.ok);
    for (Eigen::Index i = 0; i < 33; ++i)
        for (Eigen::Index j = 0; j < 33; ++j)
            CHECK(std::abs(res.psi(i, j) -
                           (g.xi1[i] * g.xi1[i] + g.xi2[j] * g.xi2[j])) < 1e-12);
    CHECK(res.path_defect < 1e-12);
}

TEST_CASE("potential reconstruction fails on nonclosed input")
{
    const auto g = Grid2D::uniform(0, 1, 21, 0, 1, 21);
    auto shear = sample_form(g, [](double, double y) { return y; },
                             [](double, double) { return 0.0; });
    const auto res = potential_reconstruct(shear, g, 1e-8);
    REQUIRE_FALSE(res.ok);
    CHECK(res.obstruction.max_abs == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("potential reconstruction converges for transcendental closed form")
{
    double prev = 0.0;
    for (int n : {17, 33, 65}) {
        const auto g = Grid2D::uniform(0, 1, n, 0, 1, n);
        auto form = sample_form(g, [](double x, double) { return std::cos(x); },
                                [](double, double) { return 1.0; });
        const auto res = potential_reconstruct(form, g, 1e-10);
        REQUIRE(res.ok);
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                err = std::max(err, std::abs(res.psi(i, j) -
                                             (std::sin(g.xi1[i]) + g.xi2[j])));
        if (n > 17) CHECK(err < prev / 3.5);
        prev = err;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("path-dependence defect bounded for closed forms")
{
    // psi = sin(x) cos(y): closed but with a genuine FD commutator.
    const auto g = Grid2D::uniform(0, 1, 65, 0, 1, 65);
    auto form = sample_form(
        g, [](double x, double y) { return std::cos(x) * std::cos(y); },
        [](double x, double y) { return -std::sin(x) * std::sin(y); });
    const double tol = commutator(form, g).max_abs * 1.5;
    const auto res = potential_reconstruct(form, g, tol);
    REQUIRE(res.ok);
    CHECK(res.path_defect <= 10.0 * tol * 1.0);
}

TEST_CASE("reconstructed potential differentiates back to a closed form")
{
    for (int n : {33, 65}) {
        const auto g = Grid2D::uniform(0, 1, n, 0, 1, n);
        auto form = sample_form(g, [](double x, double) { return std::cos(x); },
                                [](double, double) { return 1.0; });
        const auto res = potential_reconstruct(form, g, 1e-10);
        REQUIRE(res.ok);
        OneForm2D dpsi;
        dpsi.A1 = d_axis1(res.psi, g.xi1);
        dpsi.A2 = d_axis2(res.psi, g.xi2);
        CHECK(commutator(dpsi, g).max_abs < 1e-10);
    }
}

TEST_CASE("transposing the form negates the commutator")
{
    const auto g = Grid2D::uniform(0, 1, 25, 0, 2, 31);
    auto form = sample_form(g, [](double x, double y) { return std::sin(3 * x) + y; },
                            [](double x, double y) { return std::cos(x * y); });
    const auto k = commutator(form, g);

    const Grid2D gt(g.xi2, g.xi1);
    OneForm2D swapped;
    swapped.A1 = form.A2.transpose();
    swapped.A2 = form.A1.transpose();
    const auto kt = commutator(swapped, gt);

    for (Eigen::Index i = 0; i < g.n1(); ++i)
        for (Eigen::Index j = 0; j < g.n2(); ++j)
            CHECK(std::abs(kt.K(j, i) + k.K(i, j)) < 1e-13);
}
