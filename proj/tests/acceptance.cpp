// End-to-end acceptance suite. Each criterion prints one pass/fail line;
// the process exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fecp/checks.hpp"

using namespace fecp;

namespace {

struct Criterion {
  std::string name;
  std::function<Report()> run;
};

}  // namespace

int main() {
  Config config;
  config.n = 2;
  config.scaling_levels = 3;
  config.seed = 0;

  std::vector<Criterion> criteria;

  criteria.push_back({"complex algebra (incidence sums, d o d)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_complex_algebra(stack.mesh(), config);
                      }});
  criteria.push_back({"whitney duality (dof/basis gram identity)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_whitney_duality(stack.mesh(), config);
                      }});
  criteria.push_back({"surface identities (stokes, trace-derivative commuting)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_surface_identities(stack.mesh(), config);
                      }});
  criteria.push_back({"local exactness and patch constants", [&] {
                        Report r;
                        for (int n = 1; n <= 3; ++n) {
                          MeshStack stack(gen_structured_cube(n));
                          r.merge(check_local_exactness(stack, config));
                        }
                        r.merge(check_poincare_stability(config));
                        return r;
                      }});
  criteria.push_back({"weight duality (weight/trace gram identity)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_weight_duality(stack, config);
                      }});
  criteria.push_back({"weight derivative relations", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_derivative_relations(stack, config);
                      }});
  criteria.push_back({"partition of unity (single and two-component boundary)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        Report r = check_partition_of_unity(stack, config, "main");
                        MeshStack hole(gen_cube_with_hole());
                        bool contractible = true;
                        for (int level = 0; level <= 2 && contractible; ++level) {
                          const std::vector<int>& list =
                              level == 0   ? hole.mesh().boundary_vertices()
                              : level == 1 ? hole.mesh().boundary_edges()
                                           : hole.mesh().boundary_faces();
                          for (int s : list)
                            contractible =
                                contractible && check_contractibility(hole.mesh(), level, s);
                        }
                        if (contractible) {
                          r.merge(check_partition_of_unity(hole, config, "two-component"));
                        } else {
                          std::printf("  note: two-component fixture skipped "
                                      "(contractibility assumption fails there)\n");
                        }
                        return r;
                      }});
  criteria.push_back({"boundary projector (trace commuting, support, level-3 mean)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        return check_boundary_projector(stack, config);
                      }});
  criteria.push_back({"composed projector (projection, traces, commuting, locality)", [&] {
                        MeshStack stack(gen_structured_cube(2));
                        Report r = check_composed_projector(stack, config);
                        r.merge(check_locality(config));
                        return r;
                      }});
  criteria.push_back({"scaling studies (weights, stability ratios, min-min)", [&] {
                        return check_scaling(config);
                      }});

  int failures = 0;
  Report full;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Report r = criteria[i].run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = r.all_pass();
    std::printf("criterion %2zu: %s  (%.1fs)  %s\n", i + 1, pass ? "PASS" : "FAIL", secs,
                criteria[i].name.c_str());
    if (!pass) {
      ++failures;
      for (const auto& rec : r.records)
        if (!rec.pass)
          std::printf("   failed: %s  value=%.3e tol=%.3e\n", rec.id.c_str(), rec.value, rec.tol);
    }
    full.merge(r);
  }
  std::printf("%d of %zu criteria failed; %d/%zu checks passed\n", failures, criteria.size(),
              static_cast<int>(full.records.size()) - full.failures(), full.records.size());
  return failures == 0 ? 0 : 1;
}
