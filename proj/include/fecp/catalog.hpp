#ifndef FECP_CATALOG_HPP
#define FECP_CATALOG_HPP

#include <memory>
#include <string>

#include "fecp/fields.hpp"

namespace fecp {

struct NamedField {
  std::string name;
  const FieldView* field;
};

/// Named analytic test fields per level: polynomials, trigonometric fields,
/// and zero-trace bubbles built from b(x) = x(1-x)y(1-y)z(1-z) on the unit
/// cube. Derivative callables are exact; `max_derivative_fd_error` checks
/// them against finite differences.
class TestFieldCatalog {
 public:
  TestFieldCatalog();

  /// Six fields per level (the last one is the zero-trace bubble for
  /// levels 0..2).
  const std::vector<NamedField>& fields(int level) const { return m_fields[level]; }
  /// The zero-trace bubble of a level (0..2).
  const FieldView& bubble(int level) const { return *m_bubbles[level]; }
  /// A field whose exterior derivative vanishes (constant / gradient / curl).
  const FieldView& closed_field(int level) const { return *m_closed[level]; }

 private:
  const FieldView* store(std::unique_ptr<FieldView> f);
  std::vector<std::unique_ptr<FieldView>> m_store;
  std::array<std::vector<NamedField>, 4> m_fields;
  std::array<const FieldView*, 3> m_bubbles{};
  std::array<const FieldView*, 3> m_closed{};
};

/// Max absolute mismatch between the derivative callable and a fourth-order
/// finite difference of the value callable at the given points.
double max_derivative_fd_error(const FieldView& u, const std::vector<Vec3>& points,
                               double h = 1e-4);

}  // namespace fecp

#endif
