#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "naphtha/properties.hpp"
#include "naphtha/simulator.hpp"

namespace naphtha {

// One (curve, composition, watson_k) triple. The generator defines ground
// truth through the surrogate simulator, so watson_k is always consistent
// with the stored composition.
struct Sample {
    Composition composition;
    DistillationCurve curve;
    double watson_k;
};

inline constexpr std::size_t kFoldCount = 5;

struct DatasetSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::array<std::vector<std::size_t>, kFoldCount> folds; // partition of train_indices
};

struct FamilyConcentrations {
    double n_paraffin = 250.0;
    double isoparaffin = 250.0;
    double naphthene = 250.0;
    double aromatic = 250.0;

    double of(Family f) const;
};

// Generative law: paraffinicity alpha ~ U(range) drives family mass targets
//   paraffin + isoparaffin = 40 + 35*alpha   wt%
//   aromatic              = 30 - 20*alpha   wt%
//   naphthene             = remainder
// and mass within each block is spread by a Dirichlet draw. Higher alpha
// means lighter, more paraffinic naphtha and a higher Watson K.
struct GeneratorConfig {
    int n_samples = 254;
    std::uint64_t seed = 0;
    double paraffinicity_lo = 0.0;
    double paraffinicity_hi = 1.0;
    FamilyConcentrations dirichlet_concentration;
    double noise_wt_pct = 0.0; // additive gaussian noise before renormalization
};

std::vector<Sample> generate(const GeneratorConfig& gcfg, const ComponentLibrary& lib,
                             const SimulatorConfig& scfg = {}, const WatsonKConfig& kcfg = {});

// Seeded uniform permutation, 20% test (rounded), remaining 80% cut into
// 5 folds whose sizes differ by at most one.
DatasetSplit split(std::size_t n_samples, std::uint64_t seed);

// CSV with header sample_id,c_01..c_25,x_01..x_30,watson_k. Values are
// written with 17 significant digits so the round trip is bit exact.
void save_dataset(const std::vector<Sample>& samples, const std::string& path);
std::vector<Sample> load_dataset(const std::string& path, const ComponentLibrary& lib,
                                 const SimulatorConfig& scfg = {});

} // namespace naphtha
