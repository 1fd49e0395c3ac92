#include "evoflow/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace evoflow::forms {

namespace {

void check_axis(const Eigen::ArrayXd& x, const char* name)
{
    if (x.size() < 3)
        throw std::invalid_argument(std::string("Grid2D: axis ") + name + " needs >= 3 points");
    for (Eigen::Index i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument(std::string("Grid2D: axis ") + name + " must be strictly increasing");
}

void check_shape(const OneForm2D& form, const Grid2D& grid)
{
    if (form.A1.rows() != grid.n1() || form.A1.cols() != grid.n2() ||
        form.A2.rows() != grid.n1() || form.A2.cols() != grid.n2())
        throw std::invalid_argument("OneForm2D: coefficient fields do not match grid");
}

// Second-order first derivative of samples f(x) at every node, nonuniform
// spacing allowed. Interior stencils are central, ends are one-sided.
void d_nonuniform(const double* f, const double* x, Eigen::Index n, double* out)
{
    auto F = [&](Eigen::Index i) { return f[i]; };
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        out[0] = (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * F(0) +
                 ((h1 + h2) / (h1 * h2)) * F(1) -
                 (h1 / (h2 * (h1 + h2))) * F(2);
    }
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1], h2 = x[i + 1] - x[i];
        out[i] = (-h2 / (h1 * (h1 + h2))) * F(i - 1) +
                          ((h2 - h1) / (h1 * h2)) * F(i) +
                          (h1 / (h2 * (h1 + h2))) * F(i + 1);
    }
    {
        const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
        out[n - 1] = (h2 / (h1 * (h1 + h2))) * F(n - 3) -
                                ((h1 + h2) / (h1 * h2)) * F(n - 2) +
                                ((h1 + 2.0 * h2) / (h2 * (h1 + h2))) * F(n - 1);
    }
}

}  // namespace

Grid2D::Grid2D(Eigen::ArrayXd x1, Eigen::ArrayXd x2)
    : xi1(std::move(x1)), xi2(std::move(x2))
{
    check_axis(xi1, "xi1");
    check_axis(xi2, "xi2");
}

Grid2D Grid2D::uniform(double a1, double b1, Eigen::Index n1,
                       double a2, double b2, Eigen::Index n2)
{
    return Grid2D(Eigen::ArrayXd::LinSpaced(n1, a1, b1),
                  Eigen::ArrayXd::LinSpaced(n2, a2, b2));
}

Eigen::ArrayXXd d_axis1(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& x)
{
    if (f.rows() != x.size())
        throw std::invalid_argument("d_axis1: row count does not match axis");
    Eigen::ArrayXXd out(f.rows(), f.cols());
    std::vector<double> col(f.rows()), dcol(f.rows());
    for (Eigen::Index j = 0; j < f.cols(); ++j) {
        for (Eigen::Index i = 0; i < f.rows(); ++i) col[i] = f(i, j);
        d_nonuniform(col.data(), x.data(), f.rows(), dcol.data());
        for (Eigen::Index i = 0; i < f.rows(); ++i) out(i, j) = dcol[i];
    }
    return out;
}

Eigen::ArrayXXd d_axis2(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& x)
{
    if (f.cols() != x.size())
        throw std::invalid_argument("d_axis2: column count does not match axis");
    Eigen::ArrayXXd out(f.rows(), f.cols());
    std::vector<double> row(f.cols()), drow(f.cols());
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) row[j] = f(i, j);
        d_nonuniform(row.data(), x.data(), f.cols(), drow.data());
        for (Eigen::Index j = 0; j < f.cols(); ++j) out(i, j) = drow[j];
    }
    return out;
}

Eigen::ArrayXd d_line(const Eigen::ArrayXd& f, const Eigen::ArrayXd& x)
{
    if (f.size() != x.size() || f.size() < 3)
        throw std::invalid_argument("d_line: need matching arrays of >= 3 samples");
    Eigen::ArrayXd out(f.size());
    d_nonuniform(f.data(), x.data(), f.size(), out.data());
    return out;
}

CommutatorField commutator(const OneForm2D& form, const Grid2D& grid)
{
    check_shape(form, grid);
    CommutatorField cf;
    cf.K = d_axis1(form.A2, grid.xi1) - d_axis2(form.A1, grid.xi2);
    const Eigen::Index n1 = grid.n1(), n2 = grid.n2();
    cf.max_abs = cf.K.block(1, 1, n1 - 2, n2 - 2).abs().maxCoeff();
    return cf;
}

std::pair<bool, double> is_closed(const OneForm2D& form, const Grid2D& grid,
                                  double tol)
{
    const double m = commutator(form, grid).max_abs;
    return {m <= tol, m};
}

bool GridPath::is_loop() const
{
    return vertices.size() >= 3 && vertices.front() == vertices.back();
}

GridPath GridPath::rectangle(Eigen::Index i0, Eigen::Index j0,
                             Eigen::Index i1, Eigen::Index j1)
{
    if (i1 <= i0 || j1 <= j0)
        throw std::invalid_argument("GridPath::rectangle: degenerate rectangle");
    GridPath p;
    for (Eigen::Index i = i0; i <= i1; ++i) p.vertices.emplace_back(i, j0);
    for (Eigen::Index j = j0 + 1; j <= j1; ++j) p.vertices.emplace_back(i1, j);
    for (Eigen::Index i = i1 - 1; i >= i0; --i) p.vertices.emplace_back(i, j1);
    for (Eigen::Index j = j1 - 1; j >= j0; --j) p.vertices.emplace_back(i0, j);
    return p;
}

double path_integral(const OneForm2D& form, const Grid2D& grid,
                     const GridPath& path)
{
    check_shape(form, grid);
    if (path.vertices.size() < 2)
        throw std::invalid_argument("path_integral: path needs >= 2 vertices");
    double sum = 0.0;
    for (size_t k = 0; k + 1 < path.vertices.size(); ++k) {
        const auto [i, j] = path.vertices[k];
        const auto [i2, j2] = path.vertices[k + 1];
        const auto di = i2 - i, dj = j2 - j;
        if (std::abs(di) + std::abs(dj) != 1)
            throw std::invalid_argument("path_integral: vertices must be grid-adjacent");
        if (i < 0 || i2 < 0 || j < 0 || j2 < 0 ||
            std::max(i, i2) >= grid.n1() || std::max(j, j2) >= grid.n2())
            throw std::invalid_argument("path_integral: vertex outside grid");
        if (di != 0)
            sum += 0.5 * (form.A1(i, j) + form.A1(i2, j2)) * (grid.xi1[i2] - grid.xi1[i]);
        else
            sum += 0.5 * (form.A2(i, j) + form.A2(i2, j2)) * (grid.xi2[j2] - grid.xi2[j]);
    }
    return sum;
}

double stokes_defect(const OneForm2D& form, const Grid2D& grid,
                     const GridPath& loop)
{
    check_shape(form, grid);
    if (!loop.is_loop())
        throw std::invalid_argument("stokes_defect: path is not a closed loop");

    Eigen::Index i0 = grid.n1(), i1 = -1, j0 = grid.n2(), j1 = -1;
    for (const auto& [i, j] : loop.vertices) {
        i0 = std::min(i0, i); i1 = std::max(i1, i);
        j0 = std::min(j0, j); j1 = std::max(j1, j);
    }
    if (i1 - i0 < 1 || j1 - j0 < 1)
        throw std::invalid_argument("stokes_defect: loop encloses no cells");
    for (const auto& [i, j] : loop.vertices)
        if (i != i0 && i != i1 && j != j0 && j != j1)
            throw std::invalid_argument("stokes_defect: loop is not a rectangle boundary");
    if (loop.vertices.size() != static_cast<size_t>(2 * ((i1 - i0) + (j1 - j0))) + 1)
        throw std::invalid_argument("stokes_defect: loop does not cover the rectangle once");

    // Signed (shoelace) area fixes the orientation and rejects degenerate
    // back-and-forth walks along the boundary.
    double signed_area = 0.0;
    for (size_t k = 0; k + 1 < loop.vertices.size(); ++k) {
        const auto [ia, ja] = loop.vertices[k];
        const auto [ib, jb] = loop.vertices[k + 1];
        signed_area += 0.5 * (grid.xi1[ia] * grid.xi2[jb] - grid.xi1[ib] * grid.xi2[ja]);
    }
    const double bbox_area = (grid.xi1[i1] - grid.xi1[i0]) * (grid.xi2[j1] - grid.xi2[j0]);
    if (std::abs(std::abs(signed_area) - bbox_area) > 1e-12 * (1.0 + bbox_area))
        throw std::invalid_argument("stokes_defect: loop does not wind the rectangle once");
    const double orient = signed_area > 0.0 ? 1.0 : -1.0;

    const CommutatorField cf = commutator(form, grid);
    double area_integral = 0.0;
    for (Eigen::Index i = i0; i < i1; ++i) {
        for (Eigen::Index j = j0; j < j1; ++j) {
            const double cell = (grid.xi1[i + 1] - grid.xi1[i]) * (grid.xi2[j + 1] - grid.xi2[j]);
            const double mean = 0.25 * (cf.K(i, j) + cf.K(i + 1, j) +
                                        cf.K(i, j + 1) + cf.K(i + 1, j + 1));
            area_integral += mean * cell;
        }
    }
    return std::abs(path_integral(form, grid, loop) - orient * area_integral);
}

PotentialResult potential_reconstruct(const OneForm2D& form, const Grid2D& grid,
                                      double tol)
{
    check_shape(form, grid);
    PotentialResult res;
    CommutatorField cf = commutator(form, grid);
    if (cf.max_abs > tol) {
        res.ok = false;
        res.obstruction = std::move(cf);
        return res;
    }

    const Eigen::Index n1 = grid.n1(), n2 = grid.n2();
    Eigen::ArrayXXd psi_a(n1, n2), psi_b(n1, n2);

    // xi1 first, then xi2 columns.
    psi_a(0, 0) = 0.0;
    for (Eigen::Index i = 1; i < n1; ++i)
        psi_a(i, 0) = psi_a(i - 1, 0) +
                      0.5 * (form.A1(i - 1, 0) + form.A1(i, 0)) * (grid.xi1[i] - grid.xi1[i - 1]);
    for (Eigen::Index j = 1; j < n2; ++j)
        for (Eigen::Index i = 0; i < n1; ++i)
            psi_a(i, j) = psi_a(i, j - 1) +
                          0.5 * (form.A2(i, j - 1) + form.A2(i, j)) * (grid.xi2[j] - grid.xi2[j - 1]);

    // xi2 first, then xi1 rows.
    psi_b(0, 0) = 0.0;
    for (Eigen::Index j = 1; j < n2; ++j)
        psi_b(0, j) = psi_b(0, j - 1) +
                      0.5 * (form.A2(0, j - 1) + form.A2(0, j)) * (grid.xi2[j] - grid.xi2[j - 1]);
    for (Eigen::Index i = 1; i < n1; ++i)
        for (Eigen::Index j = 0; j < n2; ++j)
            psi_b(i, j) = psi_b(i - 1, j) +
                          0.5 * (form.A1(i - 1, j) + form.A1(i, j)) * (grid.xi1[i] - grid.xi1[i - 1]);

    res.ok = true;
    res.path_defect = (psi_a - psi_b).abs().maxCoeff();
    res.psi = std::move(psi_a);
    res.obstruction = std::move(cf);
    return res;
}

}  // namespace evoflow::forms
