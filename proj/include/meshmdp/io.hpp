#pragma once

// CSV writers for solver and benchmark outputs.  UTF-8, comma separated,
// header row, '.' decimal, no locale dependence.

#include <ostream>
#include <string>
#include <vector>

#include "meshmdp/detail/csv.hpp"
#include "meshmdp/lqg.hpp"
#include "meshmdp/oracles.hpp"
#include "meshmdp/solver.hpp"

namespace meshmdp {

inline constexpr const char* kTableHeader =
    "config_id,n_paths,mean,abs_bias,std,reference,reference_std,degenerate_count,density_evals,"
    "wall_time_s";

inline void write_table_header(std::ostream& out) { out << kTableHeader << '\n'; }

// Failed rows keep their N and reference; statistics are written as nan.
inline void write_table_row(std::ostream& out, const std::string& config_id, const RunResult& r) {
  const bool bad = r.error.has_value();
  const auto num = [bad](double v) { return bad ? std::string("nan") : csv::number(v); };
  out << csv::field(config_id) << ',' << r.n_paths << ',' << num(r.mean) << ',' << num(r.abs_bias)
      << ',' << num(r.std) << ',' << csv::number(r.reference) << ','
      << csv::number(r.reference_std) << ',' << r.degenerate_weight_count << ','
      << r.density_evals << ',' << csv::fixed(r.wall_time, 3) << '\n';
}

inline void write_table_csv(std::ostream& out, const TableResult& t) {
  write_table_header(out);
  for (const auto& r : t.rows) write_table_row(out, t.config.config_id, r);
}

// path,step,value,action_index; the action index is empty at the terminal step.
inline void write_values_csv(std::ostream& out, const ValueTable& values, const PolicyTable& policy) {
  out << "path,step,value,action_index\n";
  for (std::size_t n = 0; n < values.n_paths(); ++n) {
    for (std::size_t h = 0; h <= values.horizon(); ++h) {
      out << n << ',' << h << ',' << csv::number(values.at(n, h)) << ',';
      if (h < values.horizon()) out << policy.choice(n, h);
      out << '\n';
    }
  }
}

inline void write_actions_csv(std::ostream& out, const ActionSet& actions) {
  out << "action_index";
  for (std::size_t k = 0; k < actions.dim(); ++k) out << ",a" << k;
  out << '\n';
  for (std::size_t i = 0; i < actions.size(); ++i) {
    out << i;
    for (double c : actions[i]) out << ',' << csv::number(c);
    out << '\n';
  }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "lambda,mesh_value,mesh_std,reference_value,reference_std,n_paths\n";
  for (const auto& r : rows) {
    const bool bad = r.error.has_value();
    out << csv::number(r.lambda) << ',' << (bad ? "nan" : csv::number(r.mesh_value)) << ','
        << (bad ? "nan" : csv::number(r.mesh_std)) << ',' << csv::number(r.reference_value) << ','
        << csv::number(r.reference_std) << ',' << r.n_paths << '\n';
  }
}

inline void write_consistency_csv(std::ostream& out, const std::vector<ConsistencySummary>& rows) {
  out << "n_paths,median_abs_error,median_weight_mass,expected_mass,median_mass_rel_deviation\n";
  for (const auto& r : rows)
    out << r.n_paths << ',' << csv::number(r.median_abs_error) << ','
        << csv::number(r.median_weight_mass) << ',' << csv::number(r.expected_mass) << ','
        << csv::number(r.median_mass_rel_deviation) << '\n';
}

inline void write_calibration_csv(std::ostream& out, const CalibrationResult& c) {
  out << "lambda,reference_value,reference_std,target,selected\n";
  for (const auto& [l, est] : c.scanned)
    out << csv::number(l) << ',' << csv::number(est.value) << ',' << csv::number(est.std_error)
        << ',' << csv::number(c.target) << ',' << (l == c.lambda ? 1 : 0) << '\n';
}

}  // namespace meshmdp
