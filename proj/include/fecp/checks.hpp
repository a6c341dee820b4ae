#ifndef FECP_CHECKS_HPP
#define FECP_CHECKS_HPP

#include <memory>

#include "fecp/applications.hpp"
#include "fecp/catalog.hpp"
#include "fecp/report.hpp"

namespace fecp {

/// Everything derived from one mesh, with the weight set built on demand.
class MeshStack {
 public:
  explicit MeshStack(Mesh m)
      : m_mesh(std::make_unique<Mesh>(std::move(m))),
        alfeld(*m_mesh),
        sc(*m_mesh, alfeld),
        wf(*m_mesh, alfeld),
        spaces(*m_mesh) {}

  const Mesh& mesh() const { return *m_mesh; }
  const WeightSet& weights() {
    if (!m_weights) m_weights = std::make_unique<WeightSet>(*m_mesh, sc, wf);
    return *m_weights;
  }

 private:
  std::unique_ptr<Mesh> m_mesh;

 public:
  AlfeldBoundaryMesh alfeld;
  SurfaceComplex sc;
  WorseyFarinMesh wf;
  DeRhamComplex spaces;

 private:
  std::unique_ptr<WeightSet> m_weights;
};

MeshStack make_stack(const Config& config);  // from config mesh source

// mesh-level validation (build invariants, partitions, contractibility)
Report check_mesh(const Mesh& mesh, const Config& config);
// incidence complex sums and d o d on random coefficients
Report check_complex_algebra(const Mesh& mesh, const Config& config);
// dof/basis gram equals the identity
Report check_whitney_duality(const Mesh& mesh, const Config& config);
// surface Stokes identities and trace-derivative commuting
Report check_surface_identities(const Mesh& mesh, const Config& config);
// rank chains of the local surface sequences and preimage residuals
Report check_local_exactness(MeshStack& stack, const Config& config);
// per-type stability of the patch constants across n = 1..scaling_levels
Report check_poincare_stability(const Config& config);
// weight/trace duality grams
Report check_weight_duality(MeshStack& stack, const Config& config);
// coefficient-exact derivative relations between weight levels
Report check_derivative_relations(MeshStack& stack, const Config& config);
// partition of unity at surface quadrature points; `tag` names the fixture
Report check_partition_of_unity(MeshStack& stack, const Config& config, const std::string& tag);
// trace commuting, support confinement, level-3 integral preservation
Report check_boundary_projector(MeshStack& stack, const Config& config);
// projection property, trace preservation, commuting on the admissible family
Report check_composed_projector(MeshStack& stack, const Config& config);
// bit-identical local coefficients under far-field perturbation (runs on the
// smallest structured cube with a nonempty deep-interior region)
Report check_locality(const Config& config);
// scaling studies: weight norms, boundary/composed stability ratios, lifting
// and minimal-extension ratios across n = 1..scaling_levels
Report check_scaling(const Config& config);
// one-off demos emitting measured constants
Report lift_demo(MeshStack& stack, const Config& config);
Report minmin_demo(MeshStack& stack, const Config& config);

}  // namespace fecp

#endif
