#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "kamtori/diophantine.hpp"
#include "kamtori/hamiltonian.hpp"
#include "kamtori/kam_driver.hpp"
#include "kamtori/smoothing.hpp"
#include "kamtori/torus.hpp"
#include "kamtori/torus_solver.hpp"

namespace kamtori {

using Json = nlohmann::ordered_json;

/// {"n", "smoothness_class", "terms": [{"k", "m", "re", "im"}], "rough_terms": [...], "box"?}.
/// Only Fourier-Taylor terms and periodic bump splines are serializable.
Json hamiltonian_to_json(const HamiltonianModel& H);
HamiltonianModel hamiltonian_from_json(const Json& j);
HamiltonianModel load_hamiltonian(const std::filesystem::path& path);

/// Coefficient dumps hold one representative per conjugate pair (first nonzero
/// entry of k positive, plus k = 0); readers rebuild the other half.
Json torus_to_json(const Torus& K);
Torus torus_from_json(const Json& j);
void write_torus_csv(const Torus& K, const std::filesystem::path& path);
Torus read_torus_csv(const std::filesystem::path& path);
/// Dispatches on the extension (.csv or .json).
Torus load_torus(const std::filesystem::path& path);
/// theta_1..theta_n, z_1..z_2n on the (2M+1)^n grid.
void write_torus_samples_csv(const Torus& K, const std::filesystem::path& path);

Json to_json(const DivisorReport& r);
Json to_json(const StepReport& r);
Json to_json(const IterationRecord& r);
Json to_json(const DiophantineReport& r);
Json to_json(const ConditionReport& r);
Json to_json(const KamSchedule& s);
Json to_json(const SequenceEntry& e);
Json to_json(const K0Selection& s);
Json to_json(const GapEnvelopeReport& r);
/// The stage summary without its Newton trace.
Json to_json(const StageRecord& s);
Json to_json(const KamCertificate& c);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);
/// One compact JSON document per line.
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& lines);

}  // namespace kamtori
