#include "fecp/quadrature.hpp"

#include <cmath>

namespace fecp {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::DegenerateCell: return "DegenerateCell";
    case ErrorCode::DanglingVertex: return "DanglingVertex";
    case ErrorCode::NotBoundarySimplex: return "NotBoundarySimplex";
    case ErrorCode::NotContractible: return "NotContractible";
    case ErrorCode::LevelMismatch: return "LevelMismatch";
    case ErrorCode::UnsupportedPair: return "UnsupportedPair";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotInRange: return "NotInRange";
    case ErrorCode::QuadratureDomainMismatch: return "QuadratureDomainMismatch";
    case ErrorCode::InfeasibleTrace: return "InfeasibleTrace";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

// Gauss-Jacobi rule on [-1,1] with weight (1-x)^alpha, via Golub-Welsch.
void gauss_jacobi(int n, double alpha, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double denom = (2.0 * k + alpha) * (2.0 * k + alpha + 2.0);
    J(k, k) = (denom == 0.0) ? 0.0 : -alpha * alpha / denom;
    if (k > 0) {
      double num = 4.0 * k * k * (k + alpha) * (k + alpha);
      double den = (2.0 * k + alpha) * (2.0 * k + alpha) * (2.0 * k + alpha + 1.0) *
                   (2.0 * k + alpha - 1.0);
      double b = num / den;
      J(k, k - 1) = J(k - 1, k) = std::sqrt(b);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  x = es.eigenvalues();
  double mu0 = std::pow(2.0, alpha + 1.0) / (alpha + 1.0);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double v0 = es.eigenvectors()(0, i);
    w(i) = mu0 * v0 * v0;
  }
}

// Same rule mapped to [0,1] with weight (1-t)^alpha.
void gauss_jacobi_01(int n, double alpha, Eigen::VectorXd& t, Eigen::VectorXd& w) {
  Eigen::VectorXd x;
  gauss_jacobi(n, alpha, x, w);
  t = (x.array() + 1.0) / 2.0;
  w /= std::pow(2.0, alpha + 1.0);
}

}  // namespace

void gauss_legendre_01(int n, Eigen::VectorXd& points, Eigen::VectorXd& weights) {
  gauss_jacobi_01(n, 0.0, points, weights);
}

Eigen::VectorXd QuadratureRule::barycentric(int i) const {
  Eigen::VectorXd lambda(dim + 1);
  double s = 0.0;
  for (int d = 0; d < dim; ++d) {
    lambda(d + 1) = points(i, d);
    s += points(i, d);
  }
  lambda(0) = 1.0 - s;
  return lambda;
}

QuadratureRule simplex_rule(int dim, int degree) {
  if (dim < 1 || dim > 3) fail(ErrorCode::InvalidArgument, "simplex_rule: dim must be 1, 2 or 3");
  if (degree < 0) fail(ErrorCode::InvalidArgument, "simplex_rule: negative degree");
  int n = (degree + 2) / 2;  // ceil((degree+1)/2)
  QuadratureRule rule;
  rule.dim = dim;
  rule.degree = degree;

  Eigen::VectorXd u, wu, v, wv, t, wt;
  gauss_jacobi_01(n, 0.0, u, wu);
  if (dim == 1) {
    rule.points.resize(n, 1);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      rule.points(i, 0) = u(i);
      rule.weights(i) = wu(i);
    }
    return rule;
  }
  gauss_jacobi_01(n, 1.0, v, wv);
  if (dim == 2) {
    // x = u(1-v), y = v; Jacobian (1-v) absorbed in the Jacobi weight.
    rule.points.resize(n * n, 2);
    rule.weights.resize(n * n);
    int q = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j, ++q) {
        rule.points(q, 0) = u(i) * (1.0 - v(j));
        rule.points(q, 1) = v(j);
        rule.weights(q) = wu(i) * wv(j);
      }
    return rule;
  }
  gauss_jacobi_01(n, 2.0, t, wt);
  // x = u(1-v)(1-w), y = v(1-w), z = w; Jacobian (1-v)(1-w)^2.
  rule.points.resize(n * n * n, 3);
  rule.weights.resize(n * n * n);
  int q = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++q) {
        rule.points(q, 0) = u(i) * (1.0 - v(j)) * (1.0 - t(k));
        rule.points(q, 1) = v(j) * (1.0 - t(k));
        rule.points(q, 2) = t(k);
        rule.weights(q) = wu(i) * wv(j) * wt(k);
      }
  return rule;
}

double barycentric_monomial_integral(const Eigen::VectorXi& exponents, int dim, double measure) {
  // int_T prod lambda_i^{a_i} = measure * d! * prod(a_i!) / (sum a_i + d)!
  auto lfact = [](int k) {
    double s = 0.0;
    for (int i = 2; i <= k; ++i) s += std::log(static_cast<double>(i));
    return s;
  };
  int total = exponents.sum();
  double logval = lfact(dim);
  for (int i = 0; i < exponents.size(); ++i) logval += lfact(exponents(i));
  logval -= lfact(total + dim);
  return measure * std::exp(logval);
}

MappedRule map_rule(const QuadratureRule& rule, const Eigen::MatrixXd& vertices) {
  const int dim = rule.dim;
  if (vertices.cols() != dim + 1)
    fail(ErrorCode::InvalidArgument, "map_rule: vertex count does not match rule dimension");
  const int amb = static_cast<int>(vertices.rows());
  Eigen::MatrixXd B(amb, dim);
  for (int d = 0; d < dim; ++d) B.col(d) = vertices.col(d + 1) - vertices.col(0);

  double measure_ratio;  // physical measure / reference measure
  if (dim == amb) {
    measure_ratio = std::abs(B.determinant());
  } else {
    measure_ratio = std::sqrt((B.transpose() * B).determinant());
  }

  MappedRule out;
  out.points.resize(amb, rule.size());
  out.weights = rule.weights * measure_ratio;
  for (int q = 0; q < rule.size(); ++q)
    out.points.col(q) = vertices.col(0) + B * rule.points.row(q).transpose();
  return out;
}

}  // namespace fecp
