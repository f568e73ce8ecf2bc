#pragma once

// JSON bundles for instances and schedules, JSON-lines run logs and the
// certificate CSV. Undefined numbers are written as null (JSON) or "nan" (CSV).

#include <pdsg/runner.hpp>

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace pdsg {

using json = nlohmann::json;

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);
/// Row-major nested arrays.
json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const json& j);

json function_to_json(const ConvexFunction& f);
FunctionPtr function_from_json(const json& j);

json instance_to_json(const ProblemInstance& instance);
ProblemInstance instance_from_json(const json& j);
void save_instance(const std::string& path, const ProblemInstance& instance);
ProblemInstance load_instance(const std::string& path);

/// {kind, params: {p, mu, L1, beta_bar, lambda0}, alphas}. A missing mu falls
/// back to default_mu.
json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const json& j, std::optional<double> default_mu = std::nullopt);

json report_to_json(const CertificateReport& r);
json snapshot_to_json(const ModelSnapshot& s);
json record_to_json(const RunRecord& r);
/// Summary of a run without the per-iteration records.
json run_summary_to_json(const RunResult& r);

/// One JSON object per recorded iteration.
void write_run_log(std::ostream& out, const RunResult& r);

/// t,p,pbar,delta,d,dist2,u_1..u_m,thm2_rhs,feasible_frac,prop1_rhs
std::string report_csv_header(Index m);
std::string report_csv_row(const CertificateReport& r, Index m);
void write_report_csv(std::ostream& out, const RunResult& r, Index m);

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double x);

}  // namespace pdsg
