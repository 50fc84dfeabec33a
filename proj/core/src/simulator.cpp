#include "naphtha/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "naphtha/error.hpp"

namespace naphtha {

namespace {

inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

inline double logit(double p) {
    return std::log(p / (1.0 - p));
}

struct MixtureView {
    const double* wt;     // 25 weights, wt% scale
    const double* bp;     // boiling points
    std::size_t n;
    double s;             // smoothing width

    double vapor(double t) const {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) v += wt[i] * sigmoid((t - bp[i]) / s);
        return v / 100.0;
    }

    // dV/dT > 0 everywhere.
    double vapor_slope(double t) const {
        double v = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double sig = sigmoid((t - bp[i]) / s);
            v += wt[i] * sig * (1.0 - sig);
        }
        return v / (100.0 * s);
    }

    double min_bp() const { return *std::min_element(bp, bp + n); }
    double max_bp() const { return *std::max_element(bp, bp + n); }
};

// Bisection for V(T) = p. lo_hint (a previous, smaller root) tightens the
// bracket; V is monotone so the warm start is always valid.
double solve_recovery(const MixtureView& mix, double p, double tol, double lo_hint) {
    const double spread = mix.s * (logit(p));
    double lo = mix.min_bp() + spread - 20.0 * mix.s;
    double hi = mix.max_bp() + spread + 20.0 * mix.s;
    if (lo_hint > lo) lo = lo_hint;

    int widen = 0;
    while (mix.vapor(lo) >= p) {
        lo -= 10.0 * mix.s;
        if (++widen > 8) raise(ErrorCode::BracketFailure, "cannot bracket recovery " + std::to_string(p));
    }
    widen = 0;
    while (mix.vapor(hi) <= p) {
        hi += 10.0 * mix.s;
        if (++widen > 8) raise(ErrorCode::BracketFailure, "cannot bracket recovery " + std::to_string(p));
    }

    int iter = 0;
    while (hi - lo > 2.0 * tol) {
        double mid = 0.5 * (lo + hi);
        if (mix.vapor(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (++iter > 200) break; // tol below FP resolution; midpoint is as good as it gets
    }
    return 0.5 * (lo + hi);
}

MixtureView make_view(const Composition& c, const ComponentLibrary& lib, const SimulatorConfig& cfg,
                      std::vector<double>& bp_storage) {
    if (c.wt_pct.size() != lib.size()) raise(ErrorCode::ShapeMismatch, "composition/library size mismatch");
    cfg.validate();
    bp_storage.resize(lib.size());
    for (std::size_t i = 0; i < lib.size(); ++i) bp_storage[i] = lib.entry(i).boiling_point_k;
    return {c.wt_pct.data(), bp_storage.data(), lib.size(), cfg.smoothing_width_k};
}

// Sensitivity row for one solved root, free-coordinate convention.
void sensitivity_row(const MixtureView& mix, double t, double* out) {
    double slope = mix.vapor_slope(t);
    for (std::size_t i = 0; i < mix.n; ++i) {
        double dv_dc = sigmoid((t - mix.bp[i]) / mix.s) / 100.0;
        out[i] = -dv_dc / slope;
    }
}

} // namespace

std::vector<double> SimulatorConfig::default_recovery_grid() {
    constexpr int n = 30;
    std::vector<double> grid(n);
    for (int j = 0; j < n; ++j) grid[j] = 0.01 + (0.99 - 0.01) * j / (n - 1);
    return grid;
}

void SimulatorConfig::validate() const {
    if (!(smoothing_width_k > 0.0))
        raise(ErrorCode::DegenerateConfig, "smoothing width must be positive");
    if (recovery_grid.size() < 2)
        raise(ErrorCode::DegenerateConfig, "recovery grid needs at least 2 points");
    double prev = 0.0;
    for (double p : recovery_grid) {
        if (!(p > prev && p < 1.0))
            raise(ErrorCode::DegenerateConfig, "recovery grid must be strictly increasing within (0,1)");
        prev = p;
    }
    if (!(root_tolerance_k > 0.0))
        raise(ErrorCode::DegenerateConfig, "root tolerance must be positive");
}

double vapor_fraction(double temperature_k, const Composition& c, const ComponentLibrary& lib,
                      const SimulatorConfig& cfg) {
    std::vector<double> bp;
    return make_view(c, lib, cfg, bp).vapor(temperature_k);
}

DistillationCurve simulate_curve(const Composition& c, const ComponentLibrary& lib, const SimulatorConfig& cfg) {
    std::vector<double> bp;
    MixtureView mix = make_view(c, lib, cfg, bp);
    DistillationCurve curve;
    curve.recovery_fractions = cfg.recovery_grid;
    curve.temperatures_k.resize(cfg.recovery_grid.size());
    double prev = -1e308;
    for (std::size_t j = 0; j < cfg.recovery_grid.size(); ++j) {
        double t = solve_recovery(mix, cfg.recovery_grid[j], cfg.root_tolerance_k, prev);
        if (t <= prev)
            raise(ErrorCode::InvariantViolation, "curve not strictly increasing at grid point " + std::to_string(j));
        curve.temperatures_k[j] = t;
        prev = t;
    }
    return curve;
}

std::vector<double> curve_sensitivities(const Composition& c, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg) {
    return curve_sensitivities(c, lib, cfg, simulate_curve(c, lib, cfg));
}

std::vector<double> curve_sensitivities(const Composition& c, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg, const DistillationCurve& solved) {
    std::vector<double> bp;
    MixtureView mix = make_view(c, lib, cfg, bp);
    if (solved.temperatures_k.size() != cfg.recovery_grid.size())
        raise(ErrorCode::ShapeMismatch, "solved curve does not match the recovery grid");
    std::vector<double> sens(solved.size() * mix.n);
    for (std::size_t j = 0; j < solved.size(); ++j)
        sensitivity_row(mix, solved.temperatures_k[j], sens.data() + j * mix.n);
    return sens;
}

std::vector<MeabpNode> meabp_nodes(const SimulatorConfig& cfg) {
    cfg.validate();
    static constexpr double kLevels[5] = {0.1, 0.3, 0.5, 0.7, 0.9};
    const auto& grid = cfg.recovery_grid;
    if (grid.front() > kLevels[0] || grid.back() < kLevels[4])
        raise(ErrorCode::DegenerateConfig, "recovery grid does not cover the 10-90% meabp stencil");
    std::vector<MeabpNode> nodes;
    for (double level : kLevels) {
        auto hi = std::lower_bound(grid.begin(), grid.end(), level);
        std::size_t b = static_cast<std::size_t>(hi - grid.begin());
        if (b == 0) b = 1;
        std::size_t a = b - 1;
        double w_hi = (level - grid[a]) / (grid[b] - grid[a]);
        nodes.push_back({static_cast<int>(a), (1.0 - w_hi) / 5.0});
        nodes.push_back({static_cast<int>(b), w_hi / 5.0});
    }
    // Merge duplicate grid indices so each root is solved once.
    std::sort(nodes.begin(), nodes.end(), [](const MeabpNode& x, const MeabpNode& y) { return x.index < y.index; });
    std::vector<MeabpNode> merged;
    for (const auto& n : nodes) {
        if (!merged.empty() && merged.back().index == n.index) {
            merged.back().weight += n.weight;
        } else {
            merged.push_back(n);
        }
    }
    return merged;
}

double meabp_from_curve(const DistillationCurve& curve, const SimulatorConfig& cfg) {
    double m = 0.0;
    for (const auto& node : meabp_nodes(cfg)) m += node.weight * curve.temperatures_k[node.index];
    return m;
}

SimulatedWatsonK simulated_watson_k(const Composition& c, const ComponentLibrary& lib, const SimulatorConfig& cfg,
                                    const WatsonKConfig& kcfg) {
    std::vector<double> bp;
    MixtureView mix = make_view(c, lib, cfg, bp);
    const auto nodes = meabp_nodes(cfg);

    // Solve only the stencil's grid points, in increasing order so each root
    // warm-starts the next. Values are identical to the full-curve solve
    // because every root is an independent bisection.
    double meabp = 0.0;
    std::vector<double> dmeabp(mix.n, 0.0);
    std::vector<double> row(mix.n);
    double prev = -1e308;
    for (const auto& node : nodes) {
        double p = cfg.recovery_grid[static_cast<std::size_t>(node.index)];
        double t = solve_recovery(mix, p, cfg.root_tolerance_k, prev);
        prev = t;
        meabp += node.weight * t;
        sensitivity_row(mix, t, row.data());
        for (std::size_t i = 0; i < mix.n; ++i) dmeabp[i] += node.weight * row[i];
    }

    const double sg = blend_specific_gravity(c, lib);
    const auto kres = watson_k(meabp, sg, kcfg);
    const auto kgrad = watson_k_gradient(meabp, sg, kcfg);

    SimulatedWatsonK out;
    out.k = kres.k;
    out.meabp_k = meabp;
    out.sg_mix = sg;
    out.grad.resize(mix.n);
    for (std::size_t i = 0; i < mix.n; ++i) {
        double dsg = -(sg * sg) / (100.0 * lib.entry(i).specific_gravity);
        out.grad[i] = kgrad.d_meabp * dmeabp[i] + kgrad.d_sg * dsg;
    }
    return out;
}

SimulatedWatsonK simulated_watson_k_raw(std::span<const double> raw, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg, const WatsonKConfig& kcfg) {
    Composition c = normalize(std::vector<double>(raw.begin(), raw.end()));
    SimulatedWatsonK r = simulated_watson_k(c, lib, cfg, kcfg);
    double sum = 0.0;
    for (double v : raw) sum += v;
    // Chain rule through c_j = 100 raw_j / sum:
    //   dk/draw_i = (100 g_i - sum_j g_j c_j) / sum.
    double dot = 0.0;
    for (std::size_t j = 0; j < r.grad.size(); ++j) dot += r.grad[j] * c.wt_pct[j];
    for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = (100.0 * r.grad[i] - dot) / sum;
    return r;
}

} // namespace naphtha
