#ifndef FECP_QUADRATURE_HPP
#define FECP_QUADRATURE_HPP

#include <Eigen/Dense>

#include "fecp/common.hpp"

namespace fecp {

/// Quadrature rule on the reference simplex of dimension 1, 2 or 3
/// (unit interval, unit triangle, unit tetrahedron). Points are stored in
/// reference coordinates; weights sum to the reference measure 1/dim!.
struct QuadratureRule {
  int dim = 0;
  int degree = 0;                 // degree of polynomial exactness
  Eigen::MatrixXd points;        // npts x dim
  Eigen::VectorXd weights;       // npts

  int size() const { return static_cast<int>(weights.size()); }

  /// Barycentric coordinates of point i (dim+1 values, lambda_0 first).
  Eigen::VectorXd barycentric(int i) const;
};

/// Conical-product rule, exact for all polynomials of total degree <= degree.
QuadratureRule simplex_rule(int dim, int degree);

/// Gauss-Legendre rule on [0,1], exact for degree <= 2n-1.
void gauss_legendre_01(int n, Eigen::VectorXd& points, Eigen::VectorXd& weights);

/// Exact integral of a barycentric monomial prod lambda_i^{a_i} over a
/// d-simplex of measure `measure` (closed form, used as test oracle and in
/// exact assembly shortcuts).
double barycentric_monomial_integral(const Eigen::VectorXi& exponents, int dim, double measure);

/// Physical image of a reference rule on the simplex spanned by `vertices`
/// (dim+1 columns, ambient dimension = rows). Returns points as columns and
/// scaled weights whose sum is the simplex measure.
struct MappedRule {
  Eigen::MatrixXd points;   // ambient_dim x npts
  Eigen::VectorXd weights;  // npts, sums to measure
};
MappedRule map_rule(const QuadratureRule& rule, const Eigen::MatrixXd& vertices);

}  // namespace fecp

#endif
