#ifndef FECP_APPLICATIONS_HPP
#define FECP_APPLICATIONS_HPP

#include "fecp/enriched.hpp"
#include "fecp/projections.hpp"

namespace fecp {

/// A discrete boundary trace: the canonical dofs attached to the boundary
/// simplices of the trace level, in boundary-list order.
struct TraceData {
  int level = 0;
  Eigen::VectorXd coeffs;
};

TraceData trace_of_discrete(const DiscreteField& u);

/// Surface evaluation of a discrete trace on a boundary face.
double trace_eval_scalar(const Mesh& mesh, const TraceData& g, int bface, const Vec3& x);
Vec3 trace_eval_tangential(const Mesh& mesh, const TraceData& g, int bface, const Vec3& x);

/// Equality-constrained quadratic minimization by the nullspace method:
/// minimize x'Gx - 2f'x subject to Cx = d. Fails with `infeasible_code`
/// when the constraints are inconsistent beyond 1e-10 relative.
Eigen::VectorXd constrained_min_quadratic(const Eigen::MatrixXd& G, const Eigen::VectorXd& f,
                                          const Eigen::MatrixXd& C, const Eigen::VectorXd& d,
                                          ErrorCode infeasible_code = ErrorCode::Infeasible);

/// Minimal-graph-norm extension of boundary data over the enriched space of
/// complex index k on the same mesh (the computable surrogate for the
/// harmonic extension; its energy is the surrogate trace norm).
class ExtensionOperator {
 public:
  ExtensionOperator(const Mesh& mesh, int level, int k = 2);

  const EnrichedDeRhamSpace& space() const { return m_space; }
  int quad_degree() const { return m_quad; }

  EnrichedField extend(const TraceData& g) const;
  /// Extension with explicit surface data (levels 0 and 2 scalar, level 1
  /// tangential); the data is L2(Gamma)-matched against the enriched traces.
  EnrichedField extend_surface(const std::function<double(int, const Vec3&)>& g_scalar,
                               const std::function<Vec3(int, const Vec3&)>& g_tangential) const;
  /// Graph norm of an enriched field through the assembled Gram matrix.
  double energy(const EnrichedField& u) const;

 private:
  const Mesh* m_mesh;
  int m_level, m_k, m_quad;
  EnrichedDeRhamSpace m_space;
  Eigen::MatrixXd m_gram;
};

/// Discrete lifting: the composed projection applied to the extension.
DiscreteField lift(const ComposedProjector& pi, const ExtensionOperator& ext, const TraceData& g);

struct MinMinReport {
  int level = 0;
  double discrete_min = 0.0;  // over the Whitney space
  double proxy_min = 0.0;     // over the enriched space
  double ratio = 0.0;         // discrete / proxy
};

/// L2-minimal fields with prescribed trace and exterior derivative, discrete
/// versus enriched. The data (g, f) must come from a feasible discrete field.
MinMinReport min_min_compare(const DeRhamComplex& spaces, int level, const TraceData& g,
                             const DiscreteField& f, int k = 2);

struct BestApproxReport {
  int level = 0;
  double constrained = 0.0;   // best approximation with the trace pinned
  double unconstrained = 0.0; // best approximation over the whole space
  double mismatch = 0.0;      // surrogate trace-norm of the data mismatch
  double ratio = 0.0;         // constrained / (unconstrained + mismatch)
};

BestApproxReport best_approx_demo(const DeRhamComplex& spaces, int level, const FieldView& u,
                                  const TraceData& g, int k = 2, int quad_degree = 10);

}  // namespace fecp

#endif
