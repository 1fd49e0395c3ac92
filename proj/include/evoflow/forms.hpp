#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace evoflow::forms {

/// Tensor-product grid in the (xi1, xi2) parameter plane. Axes must be
/// strictly increasing with at least 3 points each; spacing may be nonuniform.
struct Grid2D {
    Eigen::ArrayXd xi1;  ///< first axis, indexes rows of coefficient fields
    Eigen::ArrayXd xi2;  ///< second axis, indexes columns

    Grid2D(Eigen::ArrayXd x1, Eigen::ArrayXd x2);

    Eigen::Index n1() const { return xi1.size(); }
    Eigen::Index n2() const { return xi2.size(); }

    static Grid2D uniform(double a1, double b1, Eigen::Index n1,
                          double a2, double b2, Eigen::Index n2);
};

/// Degree-1 skew-symmetric form A1 dxi1 + A2 dxi2 sampled on a grid.
struct OneForm2D {
    Eigen::ArrayXXd A1;
    Eigen::ArrayXXd A2;
};

/// Antisymmetrized mixed derivative K = D1 A2 - D2 A1. The field covers the
/// whole grid (second-order one-sided stencils on the boundary ring), but
/// max_abs is taken over the strict interior where the stencil is central.
struct CommutatorField {
    Eigen::ArrayXXd K;
    double max_abs = 0.0;
};

CommutatorField commutator(const OneForm2D& form, const Grid2D& grid);

/// True iff the interior max |commutator| is within tol; also returns it.
std::pair<bool, double> is_closed(const OneForm2D& form, const Grid2D& grid,
                                  double tol);

/// Lattice path; consecutive vertices differ by one index step along one axis.
struct GridPath {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> vertices;

    bool is_loop() const;

    /// Counterclockwise boundary of the index rectangle [i0,i1] x [j0,j1].
    static GridPath rectangle(Eigen::Index i0, Eigen::Index j0,
                              Eigen::Index i1, Eigen::Index j1);
};

/// Trapezoidal line integral of the form along the path.
double path_integral(const OneForm2D& form, const Grid2D& grid,
                     const GridPath& path);

/// |loop integral - area integral of K over the enclosed cells| for a
/// rectangular loop. O(h^2) for smooth coefficients.
double stokes_defect(const OneForm2D& form, const Grid2D& grid,
                     const GridPath& loop);

/// Result of attempting to integrate the form into a potential. On failure
/// the commutator field is returned as the obstruction.
struct PotentialResult {
    bool ok = false;
    Eigen::ArrayXXd psi;          ///< potential with psi(origin) = 0, when ok
    double path_defect = 0.0;     ///< max spread between axis-order integrations
    CommutatorField obstruction;  ///< populated when !ok
};

PotentialResult potential_reconstruct(const OneForm2D& form, const Grid2D& grid,
                                      double tol);

// Second-order finite-difference first derivatives along each axis; exposed
// because the diagnostics module differentiates fields on the same grids.
Eigen::ArrayXXd d_axis1(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& x);
Eigen::ArrayXXd d_axis2(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& x);
Eigen::ArrayXd d_line(const Eigen::ArrayXd& f, const Eigen::ArrayXd& x);

}  // namespace evoflow::forms
