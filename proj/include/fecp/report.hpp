#ifndef FECP_REPORT_HPP
#define FECP_REPORT_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace fecp {

/// Harness configuration; tolerances default per check and can be
/// overridden by id.
struct Config {
  int n = 2;                      // generated cube subdivisions
  std::string mesh_path;          // when set, read instead of generating
  std::vector<int> levels = {0, 1, 2, 3};
  int volume_quad = 6;
  int surface_quad = 6;
  int alpha_quad_analytic = 10;   // alphas of transcendental inputs
  int scaling_levels = 3;         // scaling studies run n = 1..scaling_levels
  std::uint64_t seed = 0;
  bool with_timing = true;        // when false, seconds are written as 0
  std::map<std::string, double> tol_overrides;

  double tol(const std::string& id, double fallback) const {
    auto it = tol_overrides.find(id);
    return it == tol_overrides.end() ? fallback : it->second;
  }
  bool has_level(int l) const {
    for (int x : levels)
      if (x == l) return true;
    return false;
  }
};

struct CheckRecord {
  std::string id;
  std::string anchor;  // stable identifier of the claim being certified
  double value = 0.0;  // measured quantity
  double tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

struct Report {
  std::vector<CheckRecord> records;
  std::map<std::string, double> constants;

  void add(const std::string& id, const std::string& anchor, double value, double tol,
           double seconds = 0.0);
  /// Pass criterion for ratio-stability records: value within [1/tol, tol].
  void add_ratio(const std::string& id, const std::string& anchor, double ratio, double bound,
                 double seconds = 0.0);
  void merge(const Report& other);
  bool all_pass() const;
  int failures() const;

  void write_json(std::ostream& out, bool with_timing = true) const;
  void write_csv(std::ostream& out, bool with_timing = true) const;
  void write_file(const std::string& path, const std::string& format,
                  bool with_timing = true) const;
};

}  // namespace fecp

#endif
