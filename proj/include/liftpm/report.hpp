#pragma once

#include <string>

#include <json.hpp>

#include "liftpm/exact.hpp"
#include "liftpm/laplace.hpp"
#include "liftpm/lattice.hpp"
#include "liftpm/lift_sim.hpp"

namespace liftpm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactVersion = "0.1.0";

// Exact rationals as {"num": "...", "den": "..."} strings.
Json rat_json(const Rat& r);

// Decimal string with 15 significant digits.
std::string fmt_double(double v);

Json lattice_json(const LatticeReport& rep, bool include_basis = true);
Json estimate_json(const AsymptoticEstimate& est);
Json sim_report_json(const SimReport& rep);
std::string sim_report_csv(const SimReport& rep);

}  // namespace liftpm
