#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace naphtha {

// The fixed roster size the whole pipeline is built around.
inline constexpr std::size_t kComponentCount = 25;

enum class Family { NParaffin, Isoparaffin, Naphthene, Aromatic };
inline constexpr std::size_t kFamilyCount = 4;

const char* family_name(Family f);
Family family_from_name(const std::string& name);

struct ComponentEntry {
    std::string name;
    Family family;
    double boiling_point_k;
    double specific_gravity;
};

// 25 named hydrocarbon components with their physical constants. Order is
// significant: it defines the index layout of every composition vector and
// every dataset column. Construction validates the roster invariants.
class ComponentLibrary {
public:
    explicit ComponentLibrary(std::vector<ComponentEntry> entries);

    // Built-in naphtha roster: 7 n-paraffins (C4-C10), 7 isoparaffins,
    // 6 naphthenes, 5 aromatics. Property values come from standard tables
    // and are configuration: load a CSV to override them.
    static const ComponentLibrary& builtin();

    static ComponentLibrary from_csv(const std::string& path);
    static ComponentLibrary from_csv_stream(std::istream& in, const std::string& origin);

    void to_csv(std::ostream& out) const;
    void to_csv_file(const std::string& path) const;

    const std::vector<ComponentEntry>& entries() const { return entries_; }
    const ComponentEntry& entry(std::size_t i) const { return entries_[i]; }
    std::size_t size() const { return entries_.size(); }

    double min_boiling_point_k() const { return min_bp_; }
    double max_boiling_point_k() const { return max_bp_; }

    // -1 when absent.
    int index_of(const std::string& name) const;

private:
    std::vector<ComponentEntry> entries_;
    double min_bp_ = 0.0;
    double max_bp_ = 0.0;
};

// 25 non-negative weight percentages summing to 100.
struct Composition {
    std::vector<double> wt_pct;
};

// Scales a raw non-negative 25-vector (any units) to wt% summing to 100.
Composition normalize(const std::vector<double>& raw);

// Harmonic weight-fraction blend (ideal volume additivity):
//   SG_mix = 1 / sum_i((c_i / 100) / SG_i)
double blend_specific_gravity(const Composition& c, const ComponentLibrary& lib);

struct WatsonKConfig {
    double b_coefficient = 1.0;
};

struct WatsonKResult {
    double k;
    double meabp_k;
    double sg_mix;
};

struct WatsonKGradient {
    double d_meabp; // dk / d(meabp_k)
    double d_sg;    // dk / d(sg)
};

// k = cbrt(1.8 * meabp_k * b) / sg. The 1.8 converts Kelvin to Rankine
// inside the cube root, so standard naphtha mixtures land in the 10-13 range.
WatsonKResult watson_k(double meabp_k, double sg, const WatsonKConfig& cfg = {});

// Analytic partials: dk/dmeabp = k / (3 meabp), dk/dsg = -k / sg.
WatsonKGradient watson_k_gradient(double meabp_k, double sg, const WatsonKConfig& cfg = {});

} // namespace naphtha
