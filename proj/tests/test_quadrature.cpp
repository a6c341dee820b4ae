#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "fecp/quadrature.hpp"

using namespace fecp;

namespace {

// Quadrature of a barycentric monomial on the reference simplex.
double quad_monomial(const QuadratureRule& rule, const Eigen::VectorXi& a) {
  double s = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    Eigen::VectorXd lambda = rule.barycentric(q);
    double v = 1.0;
    for (int i = 0; i < a.size(); ++i) v *= std::pow(lambda(i), a(i));
    s += rule.weights(q) * v;
  }
  return s;
}

void all_monomials(int dim, int degree, std::vector<Eigen::VectorXi>& out) {
  Eigen::VectorXi a = Eigen::VectorXi::Zero(dim + 1);
  // enumerate exponent tuples with total <= degree (lambda_0 exponent implied free)
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == dim + 1) {
      out.push_back(a);
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      a(pos) = e;
      rec(pos + 1, remaining - e);
    }
    a(pos) = 0;
  };
  rec(0, degree);
}

}  // namespace

TEST_CASE("monomial exactness up to the stated degree") {
  for (int dim = 1; dim <= 3; ++dim) {
    for (int degree : {1, 2, 4, 6, 8}) {
      QuadratureRule rule = simplex_rule(dim, degree);
      double ref_measure = 1.0;
      for (int d = 2; d <= dim; ++d) ref_measure /= d;
      CHECK(std::abs(rule.weights.sum() - ref_measure) < 1e-14);
      std::vector<Eigen::VectorXi> monomials;
      all_monomials(dim, degree, monomials);
      for (const auto& a : monomials) {
        double exact = barycentric_monomial_integral(a, dim, ref_measure);
        double approx = quad_monomial(rule, a);
        CHECK(std::abs(approx - exact) < 1e-14 * std::max(1.0, std::abs(exact)));
      }
    }
  }
}

TEST_CASE("mapped rule integrates measure and affine functions") {
  QuadratureRule rule = simplex_rule(2, 2);
  Eigen::MatrixXd tri(3, 3);
  tri.col(0) << 0.0, 0.0, 1.0;
  tri.col(1) << 2.0, 0.0, 1.0;
  tri.col(2) << 0.0, 3.0, 1.0;
  MappedRule mr = map_rule(rule, tri);
  CHECK(std::abs(mr.weights.sum() - 3.0) < 1e-13);
  double sx = 0.0;
  for (int q = 0; q < mr.weights.size(); ++q) sx += mr.weights(q) * mr.points(0, q);
  CHECK(std::abs(sx - 3.0 * (2.0 / 3.0)) < 1e-13);  // centroid x = 2/3

  QuadratureRule r3 = simplex_rule(3, 3);
  Eigen::MatrixXd tet(3, 4);
  tet.col(0) << 0, 0, 0;
  tet.col(1) << 1, 0, 0;
  tet.col(2) << 0, 1, 0;
  tet.col(3) << 0, 0, 1;
  MappedRule m3 = map_rule(r3, tet);
  CHECK(std::abs(m3.weights.sum() - 1.0 / 6.0) < 1e-14);
}

TEST_CASE("gauss-legendre endpoints and symmetry") {
  Eigen::VectorXd x, w;
  gauss_legendre_01(4, x, w);
  CHECK(std::abs(w.sum() - 1.0) < 1e-14);
  for (int i = 0; i < 4; ++i) {
    CHECK(x(i) > 0.0);
    CHECK(x(i) < 1.0);
    CHECK(std::abs(x(i) + x(3 - i) - 1.0) < 1e-13);
  }
}
