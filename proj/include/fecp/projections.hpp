#ifndef FECP_PROJECTIONS_HPP
#define FECP_PROJECTIONS_HPP

#include "fecp/weights.hpp"

namespace fecp {

/// The boundary operators built from the weights: the linear maps alpha
/// evaluated by volume quadrature over the extension supports, the
/// lowest-order operator P0 (whose basis fields are the Whitney forms of the
/// boundary simplices), and the trace operators Pib. At lowest order the
/// higher-order component is zero, so Pib = P0 for levels 0..2; level 3 is
/// the canonical projection onto cellwise means.
class BoundaryProjector {
 public:
  BoundaryProjector(const WeightSet& weights, const DeRhamComplex& spaces, int quad_degree = 6);

  const WeightSet& weights() const { return *m_weights; }
  const DeRhamComplex& spaces() const { return *m_spaces; }
  int quad_degree() const { return m_quad_degree; }

  /// alpha_r^l(u): the integration-by-parts volume formula over supp(Y_r);
  /// u is evaluated with parent-mesh cell contexts.
  double alpha(int level, int anchor, const FieldView& u) const;
  /// alpha_tau^3(u) = plain cell integral.
  double alpha3(int cell, const FieldView& u) const;

  /// P0^l(u) = sum over boundary l-simplices of alpha * Whitney form.
  /// `parent_support`, when given, skips anchors whose extension support
  /// does not meet the listed parent cells.
  DiscreteField apply_P0(int level, const FieldView& u,
                         const std::vector<int>* parent_support = nullptr) const;
  /// Pib^l: P0 at levels 0..2, cellwise-mean projection at level 3.
  DiscreteField apply(int level, const FieldView& u,
                      const std::vector<int>* parent_support = nullptr) const;
  DiscreteField apply_level3(const FieldView& u) const;

 private:
  const WeightSet* m_weights;
  const DeRhamComplex* m_spaces;
  int m_quad_degree;
};

/// Contract for the interior commuting projection onto the zero-trace
/// spaces: identity on the zero-trace discrete space; commuting with d on
/// its exactness domain (members of the zero-trace discrete spaces, smooth
/// fields with vanishing trace, and sums of a discrete field with such a
/// field); cell-local boundedness is reported by the harness, not asserted.
class InteriorProjector {
 public:
  virtual ~InteriorProjector() = default;
  virtual DiscreteField project(int level, const FieldView& u) const = 0;
};

/// Default interior projection: canonical interpolation using the interior
/// dofs only. Output coefficients live in the full space with zero boundary
/// entries.
class CanonicalInteriorProjector : public InteriorProjector {
 public:
  CanonicalInteriorProjector(const DeRhamComplex& spaces, int quad_degree = 6)
      : m_spaces(&spaces), m_quad_degree(quad_degree) {}
  DiscreteField project(int level, const FieldView& u) const override;

 private:
  const DeRhamComplex* m_spaces;
  int m_quad_degree;
};

/// Pi = mPi(I - Pib) + Pib. Discrete inputs use exact dof readout for the
/// interior part; general fields go through quadrature.
class ComposedProjector {
 public:
  ComposedProjector(const BoundaryProjector& boundary, const InteriorProjector& interior)
      : m_boundary(&boundary), m_interior(&interior) {}

  const BoundaryProjector& boundary() const { return *m_boundary; }

  DiscreteField apply(int level, const FieldView& u,
                      const std::vector<int>* parent_support = nullptr) const;
  DiscreteField apply(int level, const DiscreteField& u) const;

 private:
  const BoundaryProjector* m_boundary;
  const InteriorProjector* m_interior;
};

}  // namespace fecp

#endif
