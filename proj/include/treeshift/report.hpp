#pragma once

#include <chrono>
#include <sstream>

#include "treeshift/hypercyclic_lab.hpp"
#include "treeshift/spectral_lab.hpp"

namespace treeshift {

// JSON payload builders. Exact rationals always serialize as "p/q" strings,
// never as floats, so theorem certificates stay exact in transit.

inline nlohmann::json magnitude_json(const Magnitude& m) {
  if (m.exact()) return rational_to_string(m.rational());
  return m.approx();
}

inline nlohmann::json extended_magnitude_json(const ExtendedMagnitude& m) {
  if (m.infinite()) return "inf";
  return magnitude_json(m.finite());
}

inline nlohmann::json norm_report_json(const NormReport& r) {
  nlohmann::json j;
  j["value"] = extended_magnitude_json(r.value);
  j["attained_at"] = r.attained_at ? nlohmann::json(r.attained_at->str()) : nlohmann::json();
  j["truncation_depth"] = r.truncation_depth;
  j["exactness"] = r.exactness == Exactness::exact ? "exact" : "lower-bound";
  return j;
}

inline nlohmann::json bound_constants_json(const BoundConstants& bc) {
  nlohmann::json j;
  j["hbs_level"] = bc.hbs_level ? nlohmann::json(*bc.hbs_level) : nlohmann::json();
  j["gamma_root"] = bc.gamma_root.str();
  j["Gamma"] = bc.gamma.str();
  j["GammaPrime"] = bc.gamma_prime.str();
  j["GammaDoublePrime"] = bc.gamma_double_prime.str();
  j["Lambda"] = bc.lambda_finite ? nlohmann::json(bc.lambda.str()) : nlohmann::json("inf");
  j["Omega"] = bc.omega_finite ? nlohmann::json(bc.omega.str()) : nlohmann::json("inf");
  return j;
}

inline nlohmann::json coeff_row_json(const CoeffRow& row) {
  nlohmann::json j;
  j["target"] = row.target.str();
  j["power"] = row.power;
  j["l1"] = row.l1.str();
  j["support_size"] = row.support_size.str();
  if (row.coeffs_elided) {
    j["coefficients"] = "elided";
  } else {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [v, value] : row.coeffs) c[v.str()] = value.str();
    j["coefficients"] = c;
  }
  return j;
}

inline nlohmann::json norm_computation_json(const NormComputation& nc) {
  nlohmann::json j;
  j["operator"] = nc.op.str();
  switch (nc.status) {
    case NormStatus::exact: j["status"] = "exact"; break;
    case NormStatus::diverges: j["status"] = "diverges"; break;
    case NormStatus::truncated: j["status"] = "truncated"; break;
  }
  j["exact_norm"] =
      nc.exact_value ? nlohmann::json(rational_to_string(*nc.exact_value)) : nlohmann::json();
  j["scan_level"] = nc.scan_level;
  if (nc.witness_row) j["witness_row"] = coeff_row_json(*nc.witness_row);
  if (!nc.lower_bound_witnesses.empty()) {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& lw : nc.lower_bound_witnesses)
      w.push_back({{"witness", lw.tag}, {"achieved", rational_to_string(lw.achieved)}});
    j["lower_bound_witnesses"] = w;
  }
  if (!nc.upper_bounds.empty()) {
    nlohmann::json u = nlohmann::json::array();
    for (const auto& b : nc.upper_bounds) u.push_back(rational_to_string(b));
    j["upper_bounds"] = u;
  }
  if (!nc.sector_rows.empty()) {
    nlohmann::json s = nlohmann::json::array();
    for (const auto& [frontier, l1] : nc.sector_rows)
      s.push_back({{"sector", frontier.str()}, {"l1", l1.str()}});
    j["sector_rows"] = s;
  }
  if (!nc.divergence.empty()) {
    nlohmann::json d = nlohmann::json::array();
    for (const auto& s : nc.divergence) {
      d.push_back({{"level", s.level},
                   {"max_row_l1", s.max_row_l1.str()},
                   {"row_witness", s.row_witness.str()},
                   {"level_witness", rational_to_string(s.level_witness)},
                   {"harmonic_witness", rational_to_string(s.harmonic_witness)}});
    }
    j["divergence"] = d;
    j["certified_unbounded"] = nc.divergence_certified;
  }
  return j;
}

inline nlohmann::json divergence_json(const std::vector<DivergenceSample>& samples,
                                      bool certified) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : samples) {
    rows.push_back({{"level", s.level},
                    {"max_row_l1", s.max_row_l1.str()},
                    {"row_witness", s.row_witness.str()},
                    {"level_witness", rational_to_string(s.level_witness)},
                    {"harmonic_witness", rational_to_string(s.harmonic_witness)}});
  }
  return {{"rows", rows}, {"certified_unbounded", certified}};
}

inline nlohmann::json spectral_rows_json(const std::vector<SpectralRadiusRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    out.push_back({{"n", r.n},
                   {"exact_norm_as_fraction", rational_to_string(r.norm)},
                   {"root", r.root},
                   {"ratio", r.ratio},
                   {"witness_vertex_path", r.witness.str()}});
  }
  return out;
}

inline nlohmann::json spectral_verdict_json(const SpectralVerdict& v) {
  nlohmann::json claims = nlohmann::json::array();
  if (v.eigenvalue_on_L) claims.push_back("eigenvalue-on-L");
  if (v.eigenvalue_on_L0) claims.push_back("eigenvalue-on-L0");
  if (v.in_spectrum) claims.push_back("in-spectrum");
  if (v.excluded_from_point_spectrum_L0) claims.push_back("excluded-from-point-spectrum-L0");
  return {{"lambda", v.lambda.str()},
          {"operator", v.op.str()},
          {"gamma", v.gamma.str()},
          {"claims", claims},
          {"residual", magnitude_json(v.residual)},
          {"depth", v.depth}};
}

inline nlohmann::json resolvent_json(const ResolventReport& r) {
  nlohmann::json j;
  j["lambda"] = r.lambda.str();
  if (r.structural_no_solution) {
    j["status"] = "structural-no-solution";
    j["reason"] = "(S f)(root) = 0 for every f, so S f = chi_root has no solution";
    return j;
  }
  j["status"] = "solved-outside-L";
  j["growth"] = norm_report_json(r.growth);
  j["max_residual"] = magnitude_json(r.max_residual);
  j["level_ratios"] = r.level_ratios;
  j["depth"] = r.depth;
  return j;
}

inline nlohmann::json criterion_run_json(const CriterionRun& run) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : run.rows) {
    rows.push_back({{"n", r.n},
                    {"BnF_norm", magnitude_json(r.bn_norm)},
                    {"RnF_norm", magnitude_json(r.rn_norm)},
                    {"identity_defect", magnitude_json(r.identity_defect)}});
  }
  nlohmann::json j;
  j["f"] = run.f_tag;
  j["n_max"] = run.n_max;
  j["rows"] = rows;
  j["verdict"] = run.verdict == CriterionVerdict::satisfied_on_window
                     ? "criterion-satisfied-on-window"
                     : "obstruction";
  if (!run.failing_column.empty()) j["failing_column"] = run.failing_column;
  j["hbs_level"] = run.hbs_level;
  j["mu"] = run.mu.str();
  j["free_end"] = run.free_end;
  return j;
}

inline nlohmann::json obstruction_json(const ObstructionResult& o) {
  return {{"v_star", o.v_star.str()},
          {"N", o.N},
          {"w_N", o.w_N.str()},
          {"bound", magnitude_json(o.bound)},
          {"certified", o.certified}};
}

// CSV emitters for the tabular interfaces.

inline std::string spectral_rows_csv(const std::vector<SpectralRadiusRow>& rows) {
  std::ostringstream os;
  os << "n,exact_norm_as_fraction,root,ratio,witness_vertex_path\n";
  os.precision(17);
  for (const auto& r : rows)
    os << r.n << "," << rational_to_string(r.norm) << "," << r.root << "," << r.ratio << ","
       << r.witness.str() << "\n";
  return os.str();
}

inline std::string criterion_rows_csv(const CriterionRun& run) {
  std::ostringstream os;
  os << "n,BnF_norm,RnF_norm,identity_defect\n";
  for (const auto& r : run.rows)
    os << r.n << "," << r.bn_norm.str() << "," << r.rn_norm.str() << ","
       << r.identity_defect.str() << "\n";
  return os.str();
}

inline std::string eigen_sweep_csv_header() { return "re_lambda,im_lambda,classification\n"; }

inline std::string eigen_sweep_csv_row(const SpectralVerdict& v) {
  std::ostringstream os;
  os.precision(17);
  Complex z = v.lambda.complex_value();
  std::string cls;
  if (v.eigenvalue_on_L0)
    cls = "eigenvalue-on-L-and-L0";
  else if (v.eigenvalue_on_L)
    cls = "eigenvalue-on-L-only";
  else
    cls = "outside-spectrum";
  os << z.real() << "," << z.imag() << "," << cls << "\n";
  return os.str();
}

inline std::string divergence_csv(const std::vector<DivergenceSample>& samples) {
  std::ostringstream os;
  os << "level,max_row_l1,row_witness,level_witness,harmonic_witness\n";
  for (const auto& s : samples)
    os << s.level << "," << s.max_row_l1.str() << "," << s.row_witness.str() << ","
       << rational_to_string(s.level_witness) << "," << rational_to_string(s.harmonic_witness)
       << "\n";
  return os.str();
}

/// Envelope for every CLI payload: the command echo, the content fingerprint
/// of the canonical spec serialization, and the wall time. Identical spec
/// and options give identical payloads.
struct ExperimentReport {
  std::string command;
  std::string tree_fingerprint;
  nlohmann::json payload;
  double wall_time_ms = 0.0;

  nlohmann::json to_json() const {
    return {{"command", command},
            {"tree_fingerprint", tree_fingerprint},
            {"wall_time_ms", wall_time_ms},
            {"payload", payload}};
  }
};

class WallClock {
 public:
  WallClock() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    auto d = std::chrono::steady_clock::now() - start_;
    return std::chrono::duration<double, std::milli>(d).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace treeshift
