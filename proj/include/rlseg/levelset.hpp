#pragma once

#include <utility>

#include "rlseg/field.hpp"

// Variational level-set core: regularized Heaviside/Dirac, the five-term
// segmentation energy, its analytic gradients, closed-form region constants,
// curvature, the explicit evolution step, and the classic two-region baseline.
//
// The energy over the image domain is
//   E = integral of  mu*H(phi) + nu*dirac(phi)*|grad phi|
//       + alpha*(H(phi) - GT)^2
//       + lambda1*(u - c1)^2*H(phi) + lambda2*(u - c2)^2*(1 - H(phi))
// where the data field u is either H(phi) itself (DataFieldMode::as_written)
// or an external feature map / image (DataFieldMode::feature_map).

namespace rlseg {

enum class DataFieldMode {
    as_written,  // data terms compare H(phi) against c1/c2
    feature_map, // data terms compare an external field u against c1/c2
};

struct EnergyWeights {
    double mu = 0.0;      // area weight, >= 0
    double nu = -0.5;     // length weight, may be negative
    double alpha = 1.0;   // supervision weight, >= 0
    double lambda1 = 1.0; // inside data weight, >= 0
    double lambda2 = 1.0; // outside data weight, >= 0
    double epsilon = 1.0; // Heaviside regularization width, > 0

    void validate() const;
};

struct RegionConstants {
    double c1 = 0.0; // mean data value inside the contour
    double c2 = 0.0; // mean data value outside
};

struct EvolutionConfig {
    double eta = 0.1;    // step size, > 0
    int inner_iters = 10; // evolution iterations per recurrence step, >= 1
    int nsteps = 3;       // recurrence depth, >= 0
    bool include_supervision_in_evolution = false;
    DataFieldMode data_field_mode = DataFieldMode::as_written;

    void validate() const;
};

// Regularized step 0.5*(1 + (2/pi)*atan(tau/epsilon)). Negative tau is
// computed as 1 - H(-tau) so that H(tau) + H(-tau) == 1 exactly.
double heaviside(double tau, double epsilon);

// dH/dtau = epsilon / (pi*(epsilon^2 + tau^2)).
double dirac(double tau, double epsilon);

// d^2 H/dtau^2, used by the exact energy gradient.
double dirac_derivative(double tau, double epsilon);

ScalarField2D heaviside_field(const ScalarField2D& phi, double epsilon);

// integral of dirac(phi)*|grad phi|.
double contour_length(const ScalarField2D& phi, double epsilon);

// integral of H(phi).
double contour_area(const ScalarField2D& phi, double epsilon);

// The field the data terms act on: H(phi) in as_written mode, u otherwise.
ScalarField2D data_field(const ScalarField2D& u, const ScalarField2D& phi, double epsilon,
                         DataFieldMode mode);

// Closed-form minimizers c1 = int(u*H)/int(H), c2 = int(u*(1-H))/int(1-H).
// Throws DegenerateRegionError naming the collapsed side when a denominator
// falls below 1e-12.
RegionConstants region_constants(const ScalarField2D& u, const ScalarField2D& phi, double epsilon,
                                 DataFieldMode mode);

// Full energy. gt may be null only when w.alpha == 0.
double energy(const ScalarField2D& u, const ScalarField2D& phi, const BinaryMask* gt,
              const RegionConstants& c, const EnergyWeights& w, DataFieldMode mode);

// Exact discrete d(energy)/d(phi) with c1, c2 held fixed. Pointwise terms
// carry a single dirac(phi) chain factor; the length term uses the adjoint
// of the discrete gradient so the result matches finite differences of
// energy() to rounding error (away from |grad phi| ~ 0 where the norm
// regularizer kinks).
ScalarField2D energy_gradient_phi(const ScalarField2D& u, const ScalarField2D& phi,
                                  const BinaryMask* gt, const RegionConstants& c,
                                  const EnergyWeights& w, DataFieldMode mode);

// (dE/dc1, dE/dc2) = (-2*lambda1*int((u-c1)*H), -2*lambda2*int((u-c2)*(1-H))).
// Both vanish at region_constants(u, phi).
std::pair<double, double> energy_gradient_c(const ScalarField2D& u, const ScalarField2D& phi,
                                            const RegionConstants& c, const EnergyWeights& w,
                                            DataFieldMode mode);

// d(energy)/d(u) for the external data field: zero in as_written mode (the
// data field is H(phi) there), otherwise 2*l1*(u-c1)*H + 2*l2*(u-c2)*(1-H)
// per pixel times spacing^2.
ScalarField2D energy_gradient_data(const ScalarField2D& u, const ScalarField2D& phi,
                                   const RegionConstants& c, const EnergyWeights& w,
                                   DataFieldMode mode);

// div(grad phi / max(|grad phi|, 1e-8)).
ScalarField2D curvature(const ScalarField2D& phi);

// One explicit update phi' = phi + eta*dirac(phi)*velocity, where velocity is
// the descent bracket for the configured data mode:
//   as_written:  -mu + nu*curv - l1*(h-c1)^2 - 2*l1*(h-c1)*h
//                + l2*(h-c2)^2 - 2*l2*(h-c2)*(1-h)
//   feature_map: -mu + nu*curv - l1*(u-c1)^2 + l2*(u-c2)^2
// plus -2*alpha*(h - GT) when cfg.include_supervision_in_evolution is set.
ScalarField2D evolution_step(const ScalarField2D& phi, const ScalarField2D& u, const BinaryMask* gt,
                             const RegionConstants& c, const EnergyWeights& w,
                             const EvolutionConfig& cfg);

struct SegmentationResult {
    BinaryMask mask;
    ScalarField2D phi;
    int iterations = 0;
};

// Classic two-region baseline: alternate region_constants (u = image,
// feature_map mode) and evolution_step until max(|delta phi|) < 1e-3 or
// max_iters iterations. The returned mask typically settles long before the
// phi increments do.
SegmentationResult chan_vese_segment(const ScalarField2D& image, const ScalarField2D& phi0,
                                     const EnergyWeights& w, const EvolutionConfig& cfg,
                                     int max_iters = 500);

enum class PhiInit {
    centered_circle, // signed distance to a centered circle, positive inside
    checkerboard,    // sin(pi*x/p) * sin(pi*y/p)
};

ScalarField2D initialize_phi(const Grid2D& grid, PhiInit kind, double size_param);

BinaryMask predict_mask(const ScalarField2D& phi);

} // namespace rlseg
