#include "liftpm/report.hpp"

#include <cstdio>
#include <sstream>

namespace liftpm {

Json rat_json(const Rat& r) {
  Json j;
  j["num"] = r.get_num().get_str();
  j["den"] = r.get_den().get_str();
  return j;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

Json lattice_json(const LatticeReport& rep, bool include_basis) {
  Json j;
  j["rank"] = rep.lattice.rank();
  j["vol_squared"] = rat_json(rep.lattice.vol_squared);
  j["expected_rank"] = rep.expected_rank;
  j["rank_matches"] = rep.rank_matches;
  j["closed_form_available"] = rep.closed_form_available;
  if (rep.closed_form_available) {
    j["closed_form_vol_squared"] = rat_json(rep.closed_form_vol_squared);
    j["closed_form_matches"] = rep.closed_form_matches;
  }
  if (!rep.note.empty()) j["note"] = rep.note;
  if (include_basis) {
    Json rows = Json::array();
    for (const auto& b : rep.lattice.basis) {
      Json row = Json::array();
      for (const auto& v : b) row.push_back(v.get_str());
      rows.push_back(row);
    }
    j["basis"] = rows;
  }
  return j;
}

Json estimate_json(const AsymptoticEstimate& est) {
  Json j;
  j["C"] = fmt_double(est.constant);
  j["p_total"] = rat_json(Rat(est.poly_power));
  j["exp_rate"] = fmt_double(est.exp_rate);
  j["det_neg_H_restricted"] = fmt_double(est.det_neg_hess_restricted);
  j["vol_squared"] = rat_json(est.vol_squared);
  Json x0 = Json::array();
  for (double v : est.x0) x0.push_back(fmt_double(v));
  j["x0"] = x0;
  j["multistart_agreement"] = est.multistart_agreement;
  j["maximizer_status"] = est.maximizer_status;
  return j;
}

namespace {

Json estimate_row(const SimEstimate& e, bool with_target) {
  Json j;
  j["value"] = fmt_double(e.value);
  j["std_error"] = fmt_double(e.std_error);
  if (with_target) {
    j["target"] = fmt_double(e.target);
    j["z_score"] = fmt_double(e.z_score);
  }
  return j;
}

}  // namespace

Json sim_report_json(const SimReport& rep) {
  Json j;
  j["n"] = rep.n;
  j["trials"] = rep.trials;
  j["kmax"] = rep.kmax;
  j["seed"] = rep.seed;
  j["mean_X"] = estimate_row(rep.mean_x, false);
  j["mean_X2"] = estimate_row(rep.mean_x2, false);
  Json zk = Json::array();
  for (int k = 2; k <= rep.kmax; ++k) {
    Json row;
    row["k"] = k;
    row["mean_Zk"] = estimate_row(rep.mean_zk[k], true);
    row["var_Zk"] = estimate_row(rep.var_zk[k], true);
    row["xzk_ratio"] = estimate_row(rep.xzk_ratio[k], true);
    zk.push_back(row);
  }
  j["cycles"] = zk;
  return j;
}

std::string sim_report_csv(const SimReport& rep) {
  std::ostringstream out;
  out << "trial,X";
  for (int k = 2; k <= rep.kmax; ++k) out << ",Z" << k;
  out << "\n";
  for (int t = 0; t < rep.trials; ++t) {
    out << t << "," << fmt_double(rep.x_samples[t]);
    for (int k = 2; k <= rep.kmax; ++k) out << "," << rep.z_samples[t][k];
    out << "\n";
  }
  return out.str();
}

}  // namespace liftpm
