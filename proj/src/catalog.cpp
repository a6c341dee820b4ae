#include "fecp/catalog.hpp"

#include <cmath>

namespace fecp {

namespace {

double bubble_value(const Vec3& x) {
  return x(0) * (1.0 - x(0)) * x(1) * (1.0 - x(1)) * x(2) * (1.0 - x(2));
}

Vec3 bubble_grad(const Vec3& x) {
  double a = x(0) * (1.0 - x(0)), b = x(1) * (1.0 - x(1)), c = x(2) * (1.0 - x(2));
  return Vec3((1.0 - 2.0 * x(0)) * b * c, a * (1.0 - 2.0 * x(1)) * c,
              a * b * (1.0 - 2.0 * x(2)));
}

}  // namespace

const FieldView* TestFieldCatalog::store(std::unique_ptr<FieldView> f) {
  m_store.push_back(std::move(f));
  return m_store.back().get();
}

TestFieldCatalog::TestFieldCatalog() {
  using AF = AnalyticField;
  auto S = [this](AF f) { return store(std::make_unique<AF>(std::move(f))); };

  // level 0
  const FieldView* c0 = S(AF::gradient_level([](const Vec3&) { return 1.0; },
                                             [](const Vec3&) { return Vec3::Zero(); }));
  const FieldView* a0 = S(AF::gradient_level(
      [](const Vec3& x) { return 0.5 + 2.0 * x(0) - x(1) + 0.25 * x(2); },
      [](const Vec3&) { return Vec3(2.0, -1.0, 0.25); }));
  const FieldView* q0 = S(AF::gradient_level(
      [](const Vec3& x) { return x(0) * x(0) - x(1) * x(2) + 0.5 * x(2) * x(2); },
      [](const Vec3& x) { return Vec3(2.0 * x(0), -x(2), -x(1) + x(2)); }));
  const FieldView* t0 = S(AF::gradient_level(
      [](const Vec3& x) { return std::sin(x(0)) * std::cos(x(1)) + std::exp(0.5 * x(2)); },
      [](const Vec3& x) {
        return Vec3(std::cos(x(0)) * std::cos(x(1)), -std::sin(x(0)) * std::sin(x(1)),
                    0.5 * std::exp(0.5 * x(2)));
      }));
  const FieldView* t0b = S(AF::gradient_level(
      [](const Vec3& x) { return std::cos(2.0 * x(0) + x(1) - x(2)); },
      [](const Vec3& x) {
        double s = -std::sin(2.0 * x(0) + x(1) - x(2));
        return Vec3(2.0 * s, s, -s);
      }));
  const FieldView* b0 = S(AF::gradient_level(bubble_value, bubble_grad));
  m_fields[0] = {{"one", c0},     {"affine", a0}, {"quadratic", q0},
                 {"trig", t0},    {"wave", t0b},  {"bubble", b0}};
  m_bubbles[0] = b0;
  m_closed[0] = c0;

  // level 1
  const FieldView* c1 = S(AF::curl_level([](const Vec3&) { return Vec3(1.0, -0.5, 0.25); },
                                         [](const Vec3&) { return Vec3::Zero(); }));
  const FieldView* a1 = S(AF::curl_level(
      [](const Vec3& x) { return Vec3(x(1), -x(0), x(2)); },
      [](const Vec3&) { return Vec3(0.0, 0.0, -2.0); }));
  const FieldView* q1 = S(AF::curl_level(
      [](const Vec3& x) { return Vec3(x(1) * x(2), x(0) * x(0), x(0) - x(1) * x(1)); },
      [](const Vec3& x) { return Vec3(-2.0 * x(1), x(1) - 1.0, 2.0 * x(0) - x(2)); }));
  const FieldView* t1 = S(AF::curl_level(
      [](const Vec3& x) { return Vec3(std::sin(x(1)), x(0) * x(2), std::cos(x(0)) + x(1)); },
      [](const Vec3& x) { return Vec3(1.0 - x(0), std::sin(x(0)), x(2) - std::cos(x(1))); }));
  const FieldView* g1 = S(AF::curl_level(
      [](const Vec3& x) {
        // gradient of sin(x)cos(y) + yz
        return Vec3(std::cos(x(0)) * std::cos(x(1)),
                    -std::sin(x(0)) * std::sin(x(1)) + x(2), x(1));
      },
      [](const Vec3&) { return Vec3::Zero(); }));
  Vec3 cdir(0.3, -1.0, 0.7);
  const FieldView* b1 = S(AF::curl_level(
      [cdir](const Vec3& x) { return Vec3(bubble_value(x) * cdir); },
      [cdir](const Vec3& x) { return Vec3(bubble_grad(x).cross(cdir)); }));
  m_fields[1] = {{"const", c1},    {"linear", a1}, {"quadratic", q1},
                 {"trig", t1},     {"gradient", g1}, {"bubble", b1}};
  m_bubbles[1] = b1;
  m_closed[1] = g1;

  // level 2
  const FieldView* c2 = S(AF::divergence_level([](const Vec3&) { return Vec3(0.5, 1.0, -0.75); },
                                               [](const Vec3&) { return 0.0; }));
  const FieldView* a2 = S(AF::divergence_level(
      [](const Vec3& x) { return Vec3(x(0), 2.0 * x(1), -x(2)); },
      [](const Vec3&) { return 2.0; }));
  const FieldView* q2 = S(AF::divergence_level(
      [](const Vec3& x) { return Vec3(x(1) * x(1), x(0) * x(2), x(2) * x(2)); },
      [](const Vec3& x) { return 2.0 * x(2); }));
  const FieldView* t2 = S(AF::divergence_level(
      [](const Vec3& x) { return Vec3(std::cos(x(1)), std::sin(x(2)), std::exp(0.3 * x(0))); },
      [](const Vec3&) { return 0.0; }));
  const FieldView* r2 = S(AF::divergence_level(
      [](const Vec3& x) {
        // curl of (0, 0, sin(x)sin(y) + xz)
        return Vec3(std::sin(x(0)) * std::cos(x(1)), -std::cos(x(0)) * std::sin(x(1)) - x(2),
                    0.0);
      },
      [](const Vec3&) { return 0.0; }));
  Vec3 cdir2(-0.8, 0.2, 1.0);
  const FieldView* b2 = S(AF::divergence_level(
      [cdir2](const Vec3& x) { return Vec3(bubble_value(x) * cdir2); },
      [cdir2](const Vec3& x) { return bubble_grad(x).dot(cdir2); }));
  m_fields[2] = {{"const", c2},  {"linear", a2}, {"quadratic", q2},
                 {"trig", t2},   {"curl", r2},   {"bubble", b2}};
  m_bubbles[2] = b2;
  m_closed[2] = r2;

  // level 3
  const FieldView* c3 = S(AF::density_level([](const Vec3&) { return 1.0; }));
  const FieldView* a3 = S(AF::density_level([](const Vec3& x) { return x(0) - 2.0 * x(1); }));
  const FieldView* q3 = S(AF::density_level([](const Vec3& x) { return x(0) * x(1) + x(2) * x(2); }));
  const FieldView* t3 = S(AF::density_level([](const Vec3& x) { return std::sin(x(0) + 2.0 * x(1)); }));
  const FieldView* e3 = S(AF::density_level([](const Vec3& x) { return std::exp(x(2) - x(0)); }));
  const FieldView* b3 = S(AF::density_level(bubble_value));
  m_fields[3] = {{"one", c3},  {"affine", a3}, {"quadratic", q3},
                 {"trig", t3}, {"exp", e3},    {"bubble", b3}};
}

double max_derivative_fd_error(const FieldView& u, const std::vector<Vec3>& points, double h) {
  auto fd = [&](auto&& f, const Vec3& x, const Vec3& dir) {
    return (-f(x + 2.0 * h * dir) + 8.0 * f(x + h * dir) - 8.0 * f(x - h * dir) +
            f(x - 2.0 * h * dir)) /
           (12.0 * h);
  };
  const Vec3 ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  double err = 0.0;
  for (const Vec3& x : points) {
    switch (u.level()) {
      case 0: {
        auto f = [&](const Vec3& y) { return u.scalar_value(-1, y); };
        Vec3 g(fd(f, x, ex), fd(f, x, ey), fd(f, x, ez));
        err = std::max(err, (g - u.vector_derivative(-1, x)).norm());
        break;
      }
      case 1: {
        auto comp = [&](int i) { return [&, i](const Vec3& y) { return u.vector_value(-1, y)(i); }; };
        Vec3 curl(fd(comp(2), x, ey) - fd(comp(1), x, ez),
                  fd(comp(0), x, ez) - fd(comp(2), x, ex),
                  fd(comp(1), x, ex) - fd(comp(0), x, ey));
        err = std::max(err, (curl - u.vector_derivative(-1, x)).norm());
        break;
      }
      case 2: {
        auto comp = [&](int i) { return [&, i](const Vec3& y) { return u.vector_value(-1, y)(i); }; };
        double div = fd(comp(0), x, ex) + fd(comp(1), x, ey) + fd(comp(2), x, ez);
        err = std::max(err, std::abs(div - u.scalar_derivative(-1, x)));
        break;
      }
      default: break;  // level 3 has no derivative
    }
  }
  return err;
}

}  // namespace fecp
