#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fecp/checks.hpp"

using namespace fecp;

namespace {

struct CliOptions {
  Config config;
  std::string report_path;
  std::string format = "json";
  std::vector<std::string> tol_overrides;
  std::string levels_csv = "0,1,2,3";
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--mesh", opt.config.mesh_path, "mesh file (text format)");
  cmd->add_option("--n", opt.config.n, "structured cube subdivisions")->check(CLI::PositiveNumber);
  cmd->add_option("--levels", opt.levels_csv, "comma-separated levels to test");
  cmd->add_option("--tol-override", opt.tol_overrides, "ID=VALUE tolerance override");
  cmd->add_option("--report", opt.report_path, "report output path");
  cmd->add_option("--format", opt.format, "report format (json|csv)")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", opt.config.seed, "seed for random-coefficient tests");
  cmd->add_flag("--no-timing", opt.no_timing, "write zero timings (byte-stable reports)");
}

void finalize_config(CliOptions& opt) {
  opt.config.levels.clear();
  std::stringstream ss(opt.levels_csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) opt.config.levels.push_back(std::stoi(item));
  for (const auto& ov : opt.tol_overrides) {
    auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw CLI::ValidationError("--tol-override", "expected ID=VALUE");
    double value = std::stod(ov.substr(eq + 1));
    if (value <= 0.0) throw CLI::ValidationError("--tol-override", "tolerances must be positive");
    opt.config.tol_overrides[ov.substr(0, eq)] = value;
  }
  opt.config.with_timing = !opt.no_timing;
}

int emit(const Report& report, const CliOptions& opt) {
  if (!opt.report_path.empty())
    report.write_file(opt.report_path, opt.format, opt.config.with_timing);
  for (const auto& r : report.records)
    std::cout << (r.pass ? "pass" : "FAIL") << "  " << r.id << "  value=" << r.value
              << " tol=" << r.tol << "\n";
  if (!report.all_pass()) {
    std::cout << report.failures() << " check(s) failed\n";
    return 1;
  }
  std::cout << "all " << report.records.size() << " checks passed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lowest-order de Rham complex with trace-preserving commuting projections"};
  app.require_subcommand(1);

  CliOptions opt;

  auto* gen = app.add_subcommand("gen-mesh", "generate a structured cube mesh");
  int gen_n = 1;
  bool gen_hole = false;
  std::string gen_out = "cube.mesh";
  gen->add_option("--n", gen_n, "subdivisions per axis")->check(CLI::PositiveNumber);
  gen->add_flag("--hole", gen_hole, "cube with a cubic hole (two boundary components)");
  gen->add_option("--out", gen_out, "output path")->required();

  auto* cmesh = app.add_subcommand("check-mesh", "mesh invariants and partitions");
  add_common(cmesh, opt);
  auto* ccomplex = app.add_subcommand("check-complex", "incidence algebra, d o d, duality, traces");
  add_common(ccomplex, opt);
  auto* csurface =
      app.add_subcommand("check-surface", "surface identities, exactness, patch constants");
  add_common(csurface, opt);
  bool with_stability = false;
  csurface->add_flag("--stability", with_stability,
                     "include cross-refinement patch-constant stability");
  auto* cweights = app.add_subcommand(
      "check-weights", "weight duality, derivative relations, partition of unity");
  add_common(cweights, opt);
  bool with_hole = false;
  cweights->add_flag("--two-component", with_hole,
                     "also run the two-component-boundary fixture");
  std::string dump_path;
  cweights->add_option("--dump", dump_path, "write per-anchor weight diagnostics (json)");
  auto* cproj =
      app.add_subcommand("check-projections", "boundary and composed projector properties");
  add_common(cproj, opt);
  bool with_locality = false;
  cproj->add_flag("--locality", with_locality, "include the deep-interior locality check");
  auto* clift = app.add_subcommand("lift-demo", "discrete lifting of boundary data");
  add_common(clift, opt);
  auto* cminmin =
      app.add_subcommand("minmin-demo", "discrete versus enriched minimal extensions");
  add_common(cminmin, opt);
  auto* cscaling = app.add_subcommand("scaling-study", "ratio tables across refinement levels");
  add_common(cscaling, opt);
  int scaling_levels = 3;
  cscaling->add_option("--max-n", scaling_levels, "largest refinement level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit with 2
  }

  try {
    if (gen->parsed()) {
      Mesh mesh = gen_hole ? gen_cube_with_hole() : gen_structured_cube(gen_n);
      write_mesh_file(mesh, gen_out);
      std::cout << "wrote " << gen_out << " (" << mesh.n_vertices() << " vertices, "
                << mesh.n_cells() << " cells)\n";
      return 0;
    }
    finalize_config(opt);
    Report report;
    if (cmesh->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(check_mesh(stack.mesh(), opt.config));
    } else if (ccomplex->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(check_complex_algebra(stack.mesh(), opt.config));
      report.merge(check_whitney_duality(stack.mesh(), opt.config));
      report.merge(check_surface_identities(stack.mesh(), opt.config));
    } else if (csurface->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(check_surface_identities(stack.mesh(), opt.config));
      report.merge(check_local_exactness(stack, opt.config));
      if (with_stability) report.merge(check_poincare_stability(opt.config));
    } else if (cweights->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(check_weight_duality(stack, opt.config));
      report.merge(check_derivative_relations(stack, opt.config));
      report.merge(check_partition_of_unity(stack, opt.config, "main"));
      if (with_hole) {
        MeshStack hole(gen_cube_with_hole());
        report.merge(check_partition_of_unity(hole, opt.config, "two-component"));
      }
      if (!dump_path.empty()) {
        std::ofstream dump(dump_path);
        if (!dump) fail(ErrorCode::IoError, "cannot open " + dump_path);
        dump_weights_json(stack.weights(), dump);
      }
    } else if (cproj->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(check_boundary_projector(stack, opt.config));
      report.merge(check_composed_projector(stack, opt.config));
      if (with_locality) report.merge(check_locality(opt.config));
    } else if (clift->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(lift_demo(stack, opt.config));
    } else if (cminmin->parsed()) {
      MeshStack stack = make_stack(opt.config);
      report.merge(minmin_demo(stack, opt.config));
    } else if (cscaling->parsed()) {
      opt.config.scaling_levels = scaling_levels;
      report.merge(check_scaling(opt.config));
      report.merge(check_poincare_stability(opt.config));
    }
    return emit(report, opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
