#pragma once

#include <span>
#include <vector>

#include "naphtha/properties.hpp"

namespace naphtha {

// Smooth surrogate for an external distillation simulator. Cumulative
// recovery is modeled as a logistic mixture over component boiling points,
//   V(T) = sum_i (c_i / 100) * sigmoid((T - T_i) / s),
// which is strictly increasing in T and differentiable in both T and c.
struct SimulatorConfig {
    double smoothing_width_k = 3.0;
    std::vector<double> recovery_grid = default_recovery_grid();
    double root_tolerance_k = 1e-6;

    // 30 points evenly spaced on [0.01, 0.99]; endpoints stay inside (0,1)
    // so the logistic inverse is finite.
    static std::vector<double> default_recovery_grid();

    void validate() const;
};

struct DistillationCurve {
    std::vector<double> recovery_fractions;
    std::vector<double> temperatures_k;

    std::size_t size() const { return temperatures_k.size(); }
};

double vapor_fraction(double temperature_k, const Composition& c, const ComponentLibrary& lib,
                      const SimulatorConfig& cfg);

// Inverts V at every grid recovery by bisection to cfg.root_tolerance_k.
DistillationCurve simulate_curve(const Composition& c, const ComponentLibrary& lib, const SimulatorConfig& cfg);

// dT_j/dc_i via the implicit function theorem at each solved root:
//   dT_j/dc_i = -(dV/dc_i) / (dV/dT) at T_j.
// Partials treat the 25 weights as free coordinates (no renormalization),
// matching a finite difference that perturbs one entry at a time.
// Row-major n_points x 25; entry [j * 25 + i].
std::vector<double> curve_sensitivities(const Composition& c, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg);
std::vector<double> curve_sensitivities(const Composition& c, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg, const DistillationCurve& solved);

// Grid nodes and weights such that meabp = sum_n weight_n * T[index_n]:
// the 10/30/50/70/90% recovery temperatures, linearly interpolated on the
// grid, averaged with weight 1/5 each.
struct MeabpNode {
    int index;
    double weight;
};
std::vector<MeabpNode> meabp_nodes(const SimulatorConfig& cfg);

double meabp_from_curve(const DistillationCurve& curve, const SimulatorConfig& cfg);

struct SimulatedWatsonK {
    double k;
    double meabp_k;
    double sg_mix;
    std::vector<double> grad; // dk/dc_i, 25 entries
};

// Watson K of a composition through the surrogate: meabp from the simulated
// curve, specific gravity from harmonic blending, k from the Watson formula.
// Only the grid points entering the meabp stencil are solved. The gradient
// uses the same free-coordinate convention as curve_sensitivities.
SimulatedWatsonK simulated_watson_k(const Composition& c, const ComponentLibrary& lib,
                                    const SimulatorConfig& cfg, const WatsonKConfig& kcfg = {});

// Accepts a raw positive vector, normalizes it internally, and folds the
// normalization Jacobian into the gradient, so dk/draw matches a finite
// difference on the raw entries. Invariant under positive rescaling of raw.
SimulatedWatsonK simulated_watson_k_raw(std::span<const double> raw, const ComponentLibrary& lib,
                                        const SimulatorConfig& cfg, const WatsonKConfig& kcfg = {});

} // namespace naphtha
