#ifndef FECP_FIELDS_HPP
#define FECP_FIELDS_HPP

#include <functional>
#include <memory>

#include "fecp/mesh.hpp"

namespace fecp {

/// A level-l field over the domain, evaluable cell by cell. Levels 0 and 3
/// are scalar, levels 1 and 2 are vector-valued; the exterior derivative is
/// vector-valued for levels 0 and 1 (grad, curl), scalar for level 2 (div),
/// and zero for level 3. The `cell` argument names the cell of the field's
/// host mesh containing x; fields defined everywhere may ignore it.
class FieldView {
 public:
  virtual ~FieldView() = default;
  virtual int level() const = 0;

  virtual double scalar_value(int cell, const Vec3& x) const;
  virtual Vec3 vector_value(int cell, const Vec3& x) const;
  virtual Vec3 vector_derivative(int cell, const Vec3& x) const;
  virtual double scalar_derivative(int cell, const Vec3& x) const;

  bool scalar_valued() const { return level() == 0 || level() == 3; }
};

/// Field given by callables for the value and its exterior derivative.
class AnalyticField : public FieldView {
 public:
  using ScalarFn = std::function<double(const Vec3&)>;
  using VectorFn = std::function<Vec3(const Vec3&)>;

  static AnalyticField gradient_level(ScalarFn value, VectorFn grad);   // level 0
  static AnalyticField curl_level(VectorFn value, VectorFn curl);       // level 1
  static AnalyticField divergence_level(VectorFn value, ScalarFn div);  // level 2
  static AnalyticField density_level(ScalarFn value);                   // level 3

  int level() const override { return m_level; }
  double scalar_value(int, const Vec3& x) const override;
  Vec3 vector_value(int, const Vec3& x) const override;
  Vec3 vector_derivative(int, const Vec3& x) const override;
  double scalar_derivative(int, const Vec3& x) const override;

 private:
  int m_level = 0;
  ScalarFn m_scalar, m_scalar_d;
  VectorFn m_vector, m_vector_d;
};

/// The exterior derivative of a level-l field viewed as a level-(l+1) field;
/// its own derivative vanishes (d o d = 0).
class DerivativeField : public FieldView {
 public:
  explicit DerivativeField(const FieldView& u) : m_u(&u) {
    if (u.level() >= 3) fail(ErrorCode::LevelMismatch, "DerivativeField: no derivative at level 3");
  }
  int level() const override { return m_u->level() + 1; }
  double scalar_value(int cell, const Vec3& x) const override {
    if (level() != 3) fail(ErrorCode::LevelMismatch, "DerivativeField: not scalar");
    return m_u->scalar_derivative(cell, x);
  }
  Vec3 vector_value(int cell, const Vec3& x) const override {
    if (level() != 1 && level() != 2)
      fail(ErrorCode::LevelMismatch, "DerivativeField: not vector");
    return m_u->vector_derivative(cell, x);
  }
  Vec3 vector_derivative(int, const Vec3&) const override { return Vec3::Zero(); }
  double scalar_derivative(int, const Vec3&) const override { return 0.0; }

 private:
  const FieldView* m_u;
};

/// a*u + b*v for same-level fields sharing the evaluation context.
class SumField : public FieldView {
 public:
  SumField(const FieldView& u, const FieldView& v, double a = 1.0, double b = 1.0);
  int level() const override { return m_u->level(); }
  double scalar_value(int cell, const Vec3& x) const override;
  Vec3 vector_value(int cell, const Vec3& x) const override;
  Vec3 vector_derivative(int cell, const Vec3& x) const override;
  double scalar_derivative(int cell, const Vec3& x) const override;

 private:
  const FieldView* m_u;
  const FieldView* m_v;
  double m_a, m_b;
};

}  // namespace fecp

#endif
