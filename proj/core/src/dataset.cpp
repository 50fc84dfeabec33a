#include "naphtha/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "naphtha/error.hpp"
#include "naphtha/rng.hpp"

namespace naphtha {

namespace {

constexpr double kBaseParaffin = 40.0;
constexpr double kAlphaParaffin = 35.0;
constexpr double kBaseAromatic = 30.0;
constexpr double kAlphaAromatic = -20.0;

struct FamilyTargets {
    double paraffin_block; // n-paraffin + isoparaffin combined
    double aromatic;
    double naphthene;
};

FamilyTargets family_targets(double alpha) {
    FamilyTargets t;
    t.paraffin_block = kBaseParaffin + kAlphaParaffin * alpha;
    t.aromatic = kBaseAromatic + kAlphaAromatic * alpha;
    t.naphthene = 100.0 - t.paraffin_block - t.aromatic;
    return t;
}

void check_targets(double alpha, const std::string& what) {
    FamilyTargets t = family_targets(alpha);
    if (t.paraffin_block < 0.0 || t.aromatic < 0.0 || t.naphthene < 0.0)
        raise(ErrorCode::DegenerateConfig,
              what + ": paraffinicity " + std::to_string(alpha) + " collapses a family total below 0");
}

double parse_field(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) raise(ErrorCode::SchemaMismatch, context + ": trailing characters in '" + s + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(ErrorCode::SchemaMismatch, context + ": cannot parse number '" + s + "'");
    }
}

} // namespace

double FamilyConcentrations::of(Family f) const {
    switch (f) {
    case Family::NParaffin: return n_paraffin;
    case Family::Isoparaffin: return isoparaffin;
    case Family::Naphthene: return naphthene;
    case Family::Aromatic: return aromatic;
    }
    return 0.0;
}

std::vector<Sample> generate(const GeneratorConfig& gcfg, const ComponentLibrary& lib,
                             const SimulatorConfig& scfg, const WatsonKConfig& kcfg) {
    if (gcfg.n_samples < 10)
        raise(ErrorCode::DegenerateConfig, "need at least 10 samples");
    if (!(gcfg.paraffinicity_lo >= 0.0 && gcfg.paraffinicity_hi <= 1.5 &&
          gcfg.paraffinicity_lo < gcfg.paraffinicity_hi))
        raise(ErrorCode::DegenerateConfig, "paraffinicity range must satisfy 0 <= lo < hi <= 1.5");
    if (gcfg.dirichlet_concentration.n_paraffin <= 0.0 || gcfg.dirichlet_concentration.isoparaffin <= 0.0 ||
        gcfg.dirichlet_concentration.naphthene <= 0.0 || gcfg.dirichlet_concentration.aromatic <= 0.0)
        raise(ErrorCode::DegenerateConfig, "dirichlet concentrations must be positive");
    if (gcfg.noise_wt_pct < 0.0)
        raise(ErrorCode::DegenerateConfig, "noise scale must be non-negative");
    check_targets(gcfg.paraffinicity_lo, "generator");
    check_targets(gcfg.paraffinicity_hi, "generator");

    // Index bookkeeping: the paraffin block spans both paraffin families.
    std::vector<std::size_t> paraffin_idx, naphthene_idx, aromatic_idx;
    for (std::size_t i = 0; i < lib.size(); ++i) {
        switch (lib.entry(i).family) {
        case Family::NParaffin:
        case Family::Isoparaffin: paraffin_idx.push_back(i); break;
        case Family::Naphthene: naphthene_idx.push_back(i); break;
        case Family::Aromatic: aromatic_idx.push_back(i); break;
        }
    }

    auto block_alpha = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> a(idx.size());
        for (std::size_t j = 0; j < idx.size(); ++j)
            a[j] = gcfg.dirichlet_concentration.of(lib.entry(idx[j]).family);
        return a;
    };
    const auto paraffin_alpha = block_alpha(paraffin_idx);
    const auto naphthene_alpha = block_alpha(naphthene_idx);
    const auto aromatic_alpha = block_alpha(aromatic_idx);

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(gcfg.n_samples));
    for (int s = 0; s < gcfg.n_samples; ++s) {
        // Each sample draws from its own substream, so generation order (or
        // parallel generation) cannot change the data.
        Rng rng = Rng::substream(gcfg.seed, static_cast<std::uint64_t>(s));
        double alpha = rng.uniform(gcfg.paraffinicity_lo, gcfg.paraffinicity_hi);
        FamilyTargets targets = family_targets(alpha);

        std::vector<double> raw(lib.size(), 0.0);
        auto fill_block = [&](const std::vector<std::size_t>& idx, std::span<const double> conc, double total) {
            auto w = rng.dirichlet(conc);
            for (std::size_t j = 0; j < idx.size(); ++j) raw[idx[j]] = total * w[j];
        };
        fill_block(paraffin_idx, paraffin_alpha, targets.paraffin_block);
        fill_block(naphthene_idx, naphthene_alpha, targets.naphthene);
        fill_block(aromatic_idx, aromatic_alpha, targets.aromatic);

        if (gcfg.noise_wt_pct > 0.0) {
            for (auto& v : raw) v = std::max(0.0, v + gcfg.noise_wt_pct * rng.gaussian());
        }

        Sample sample;
        sample.composition = normalize(raw);
        sample.curve = simulate_curve(sample.composition, lib, scfg);
        sample.watson_k = simulated_watson_k(sample.composition, lib, scfg, kcfg).k;

        // The Sample invariants are checked, not assumed.
        double sum = std::accumulate(sample.composition.wt_pct.begin(), sample.composition.wt_pct.end(), 0.0);
        if (std::abs(sum - 100.0) > 1e-9)
            raise(ErrorCode::InvariantViolation, "generated composition does not sum to 100");
        if (!std::isfinite(sample.watson_k) || sample.watson_k <= 0.0)
            raise(ErrorCode::InvariantViolation, "generated watson k is not positive/finite");
        samples.push_back(std::move(sample));
    }
    return samples;
}

DatasetSplit split(std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 10) raise(ErrorCode::TooFewSamples, "split needs at least 10 samples");
    std::vector<std::size_t> perm(n_samples);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng = Rng::substream(seed, 0);
    rng.shuffle(perm);

    std::size_t n_test = static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(n_samples)));

    DatasetSplit out;
    out.test_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());

    std::size_t n_train = out.train_indices.size();
    std::size_t base = n_train / kFoldCount;
    std::size_t extra = n_train % kFoldCount;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < kFoldCount; ++f) {
        std::size_t len = base + (f < extra ? 1 : 0);
        out.folds[f].assign(out.train_indices.begin() + static_cast<std::ptrdiff_t>(pos),
                            out.train_indices.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    }
    return out;
}

void save_dataset(const std::vector<Sample>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write dataset '" + path + "'");
    out << "sample_id";
    for (std::size_t i = 1; i <= kComponentCount; ++i) {
        char h[8];
        std::snprintf(h, sizeof(h), "c_%02zu", i);
        out << ',' << h;
    }
    std::size_t n_points = samples.empty() ? 30 : samples.front().curve.size();
    for (std::size_t j = 1; j <= n_points; ++j) {
        char h[8];
        std::snprintf(h, sizeof(h), "x_%02zu", j);
        out << ',' << h;
    }
    out << ",watson_k\n";

    char buf[32];
    for (std::size_t s = 0; s < samples.size(); ++s) {
        out << s;
        for (double v : samples[s].composition.wt_pct) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        for (double v : samples[s].curve.temperatures_k) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), ",%.17g\n", samples[s].watson_k);
        out << buf;
    }
    if (!out) raise(ErrorCode::IoFailure, "write failed for dataset '" + path + "'");
}

std::vector<Sample> load_dataset(const std::string& path, const ComponentLibrary& lib, const SimulatorConfig& scfg) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open dataset '" + path + "'");
    scfg.validate();
    const std::size_t n_points = scfg.recovery_grid.size();
    const std::size_t expected_cols = 1 + lib.size() + n_points + 1;

    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::SchemaMismatch, path + ": empty dataset");
    {
        std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
        if (cols != expected_cols)
            raise(ErrorCode::SchemaMismatch, path + ": header has " + std::to_string(cols) + " columns, expected " +
                                                 std::to_string(expected_cols));
    }

    std::vector<Sample> samples;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        fields.reserve(expected_cols);
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != expected_cols)
            raise(ErrorCode::SchemaMismatch, path + " row " + std::to_string(row) + ": expected " +
                                                 std::to_string(expected_cols) + " columns, got " +
                                                 std::to_string(fields.size()));
        const std::string ctx = path + " row " + std::to_string(row);

        Sample s;
        s.composition.wt_pct.resize(lib.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < lib.size(); ++i) {
            double v = parse_field(fields[1 + i], ctx);
            if (!std::isfinite(v)) raise(ErrorCode::InvariantViolation, ctx + ": non-finite composition value");
            if (v < 0.0) raise(ErrorCode::InvariantViolation, ctx + ": negative composition value");
            s.composition.wt_pct[i] = v;
            sum += v;
        }
        if (std::abs(sum - 100.0) > 1e-9)
            raise(ErrorCode::InvariantViolation,
                  ctx + ": composition sums to " + std::to_string(sum) + ", expected 100");

        s.curve.recovery_fractions = scfg.recovery_grid;
        s.curve.temperatures_k.resize(n_points);
        double prev = -1e308;
        for (std::size_t j = 0; j < n_points; ++j) {
            double t = parse_field(fields[1 + lib.size() + j], ctx);
            if (!std::isfinite(t) || t <= prev)
                raise(ErrorCode::InvariantViolation, ctx + ": curve temperatures must be finite and increasing");
            s.curve.temperatures_k[j] = t;
            prev = t;
        }
        s.watson_k = parse_field(fields.back(), ctx);
        if (!std::isfinite(s.watson_k) || s.watson_k <= 0.0)
            raise(ErrorCode::InvariantViolation, ctx + ": watson k must be positive");
        samples.push_back(std::move(s));
    }
    return samples;
}

} // namespace naphtha
