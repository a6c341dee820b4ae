#include "fecp/report.hpp"

#include <fstream>

#include <json.hpp>

#include "fecp/common.hpp"

namespace fecp {

void Report::add(const std::string& id, const std::string& anchor, double value, double tol,
                 double seconds) {
  CheckRecord r;
  r.id = id;
  r.anchor = anchor;
  r.value = value;
  r.tol = tol;
  r.pass = value <= tol;
  r.seconds = seconds;
  records.push_back(std::move(r));
}

void Report::add_ratio(const std::string& id, const std::string& anchor, double ratio,
                       double bound, double seconds) {
  CheckRecord r;
  r.id = id;
  r.anchor = anchor;
  r.value = ratio;
  r.tol = bound;
  r.pass = ratio <= bound && ratio >= 1.0 / bound;
  r.seconds = seconds;
  records.push_back(std::move(r));
}

void Report::merge(const Report& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  for (const auto& [k, v] : other.constants) constants[k] = v;
}

bool Report::all_pass() const { return failures() == 0; }

int Report::failures() const {
  int n = 0;
  for (const auto& r : records)
    if (!r.pass) ++n;
  return n;
}

void Report::write_json(std::ostream& out, bool with_timing) const {
  nlohmann::ordered_json j;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    nlohmann::ordered_json rec;
    rec["id"] = r.id;
    rec["anchor"] = r.anchor;
    rec["value"] = r.value;
    rec["tol"] = r.tol;
    rec["pass"] = r.pass;
    rec["seconds"] = with_timing ? r.seconds : 0.0;
    j["records"].push_back(rec);
  }
  nlohmann::ordered_json c;
  for (const auto& [k, v] : constants) c[k] = v;
  j["constants"] = c;
  out << j.dump(2) << "\n";
}

void Report::write_csv(std::ostream& out, bool with_timing) const {
  out << "id,anchor,value,tol,pass,seconds\n";
  out.precision(17);
  for (const auto& r : records)
    out << r.id << "," << r.anchor << "," << r.value << "," << r.tol << ","
        << (r.pass ? "true" : "false") << "," << (with_timing ? r.seconds : 0.0) << "\n";
}

void Report::write_file(const std::string& path, const std::string& format,
                        bool with_timing) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path);
  if (format == "json")
    write_json(out, with_timing);
  else if (format == "csv")
    write_csv(out, with_timing);
  else
    fail(ErrorCode::InvalidArgument, "unknown report format: " + format);
}

}  // namespace fecp
