#include "naphtha/properties.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "naphtha/error.hpp"

namespace naphtha {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& context) {
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

const char* family_name(Family f) {
    switch (f) {
    case Family::NParaffin: return "n-paraffin";
    case Family::Isoparaffin: return "isoparaffin";
    case Family::Naphthene: return "naphthene";
    case Family::Aromatic: return "aromatic";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "n-paraffin") return Family::NParaffin;
    if (name == "isoparaffin") return Family::Isoparaffin;
    if (name == "naphthene") return Family::Naphthene;
    if (name == "aromatic") return Family::Aromatic;
    raise(ErrorCode::SchemaMismatch, "unknown component family '" + name + "'");
}

ComponentLibrary::ComponentLibrary(std::vector<ComponentEntry> entries) : entries_(std::move(entries)) {
    if (entries_.size() != kComponentCount)
        raise(ErrorCode::SchemaMismatch,
              "component library must have exactly 25 entries, got " + std::to_string(entries_.size()));
    std::set<std::string> names;
    std::array<int, kFamilyCount> family_counts{};
    min_bp_ = entries_.front().boiling_point_k;
    max_bp_ = entries_.front().boiling_point_k;
    for (const auto& e : entries_) {
        if (!names.insert(e.name).second)
            raise(ErrorCode::InvariantViolation, "duplicate component name '" + e.name + "'");
        if (!(e.boiling_point_k > 0.0) || !std::isfinite(e.boiling_point_k))
            raise(ErrorCode::InvariantViolation, e.name + ": boiling point must be positive and finite");
        if (!(e.specific_gravity > 0.3 && e.specific_gravity < 1.2))
            raise(ErrorCode::InvariantViolation, e.name + ": specific gravity must lie in (0.3, 1.2)");
        family_counts[static_cast<std::size_t>(e.family)]++;
        min_bp_ = std::min(min_bp_, e.boiling_point_k);
        max_bp_ = std::max(max_bp_, e.boiling_point_k);
    }
    for (std::size_t f = 0; f < kFamilyCount; ++f) {
        if (family_counts[f] == 0)
            raise(ErrorCode::InvariantViolation,
                  std::string("family '") + family_name(static_cast<Family>(f)) + "' has no components");
    }
}

const ComponentLibrary& ComponentLibrary::builtin() {
    static const ComponentLibrary lib(std::vector<ComponentEntry>{
        {"n-butane", Family::NParaffin, 272.65, 0.584},
        {"n-pentane", Family::NParaffin, 309.22, 0.631},
        {"n-hexane", Family::NParaffin, 341.88, 0.664},
        {"n-heptane", Family::NParaffin, 371.58, 0.688},
        {"n-octane", Family::NParaffin, 398.83, 0.707},
        {"n-nonane", Family::NParaffin, 423.97, 0.722},
        {"n-decane", Family::NParaffin, 447.30, 0.734},
        {"isobutane", Family::Isoparaffin, 261.43, 0.563},
        {"isopentane", Family::Isoparaffin, 301.00, 0.625},
        {"2-methylpentane", Family::Isoparaffin, 333.41, 0.658},
        {"2-methylhexane", Family::Isoparaffin, 363.20, 0.683},
        {"2-methylheptane", Family::Isoparaffin, 390.80, 0.702},
        {"2-methyloctane", Family::Isoparaffin, 416.43, 0.718},
        {"2-methylnonane", Family::Isoparaffin, 440.15, 0.731},
        {"cyclopentane", Family::Naphthene, 322.40, 0.751},
        {"methylcyclopentane", Family::Naphthene, 344.96, 0.754},
        {"cyclohexane", Family::Naphthene, 353.87, 0.783},
        {"methylcyclohexane", Family::Naphthene, 374.08, 0.774},
        {"ethylcyclohexane", Family::Naphthene, 404.95, 0.792},
        {"propylcyclohexane", Family::Naphthene, 429.90, 0.797},
        {"benzene", Family::Aromatic, 353.24, 0.884},
        {"toluene", Family::Aromatic, 383.78, 0.872},
        {"ethylbenzene", Family::Aromatic, 409.35, 0.871},
        {"pseudocumene", Family::Aromatic, 442.53, 0.880},
        {"n-butylbenzene", Family::Aromatic, 456.46, 0.864},
    });
    return lib;
}

ComponentLibrary ComponentLibrary::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open component library '" + path + "'");
    return from_csv_stream(in, path);
}

ComponentLibrary ComponentLibrary::from_csv_stream(std::istream& in, const std::string& origin) {
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::SchemaMismatch, origin + ": empty library file");
    auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"name", "family", "boiling_point_k", "specific_gravity"};
    if (header != expected)
        raise(ErrorCode::SchemaMismatch, origin + ": bad header, expected name,family,boiling_point_k,specific_gravity");
    std::vector<ComponentEntry> entries;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            raise(ErrorCode::SchemaMismatch, origin + " row " + std::to_string(row) + ": expected 4 columns, got " +
                                                 std::to_string(fields.size()));
        ComponentEntry e;
        e.name = fields[0];
        e.family = family_from_name(fields[1]);
        e.boiling_point_k = parse_double(fields[2], origin + " row " + std::to_string(row));
        e.specific_gravity = parse_double(fields[3], origin + " row " + std::to_string(row));
        entries.push_back(std::move(e));
    }
    return ComponentLibrary(std::move(entries));
}

void ComponentLibrary::to_csv(std::ostream& out) const {
    out << "name,family,boiling_point_k,specific_gravity\n";
    char buf[128];
    for (const auto& e : entries_) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.17g,%.17g\n", e.name.c_str(), family_name(e.family),
                      e.boiling_point_k, e.specific_gravity);
        out << buf;
    }
}

void ComponentLibrary::to_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write component library '" + path + "'");
    to_csv(out);
}

int ComponentLibrary::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].name == name) return static_cast<int>(i);
    return -1;
}

Composition normalize(const std::vector<double>& raw) {
    if (raw.size() != kComponentCount)
        raise(ErrorCode::ShapeMismatch, "composition must have 25 entries, got " + std::to_string(raw.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (!std::isfinite(raw[i]))
            raise(ErrorCode::NonFinite, "composition entry " + std::to_string(i) + " is not finite");
        if (raw[i] < 0.0)
            raise(ErrorCode::NegativeEntry, "composition entry " + std::to_string(i) + " is negative");
        sum += raw[i];
    }
    if (sum == 0.0) raise(ErrorCode::AllZero, "composition sums to zero");
    Composition c;
    c.wt_pct.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) c.wt_pct[i] = 100.0 * raw[i] / sum;
    return c;
}

double blend_specific_gravity(const Composition& c, const ComponentLibrary& lib) {
    if (c.wt_pct.size() != lib.size())
        raise(ErrorCode::ShapeMismatch, "composition/library size mismatch");
    double inv = 0.0;
    for (std::size_t i = 0; i < lib.size(); ++i)
        inv += (c.wt_pct[i] / 100.0) / lib.entry(i).specific_gravity;
    return 1.0 / inv;
}

WatsonKResult watson_k(double meabp_k, double sg, const WatsonKConfig& cfg) {
    if (!(meabp_k > 0.0) || !std::isfinite(meabp_k))
        raise(ErrorCode::NonPositiveInput, "mean average boiling point must be positive");
    if (!(sg > 0.0) || !std::isfinite(sg))
        raise(ErrorCode::NonPositiveInput, "specific gravity must be positive");
    if (!(cfg.b_coefficient > 0.0))
        raise(ErrorCode::NonPositiveInput, "b coefficient must be positive");
    WatsonKResult r;
    r.meabp_k = meabp_k;
    r.sg_mix = sg;
    r.k = std::cbrt(1.8 * meabp_k * cfg.b_coefficient) / sg;
    return r;
}

WatsonKGradient watson_k_gradient(double meabp_k, double sg, const WatsonKConfig& cfg) {
    const double k = watson_k(meabp_k, sg, cfg).k;
    return {k / (3.0 * meabp_k), -k / sg};
}

} // namespace naphtha
