#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stieltjes/core.hpp"
#include "stieltjes/interp.hpp"
#include "stieltjes/numerics.hpp"

namespace stieltjes {

struct BasisElement {
    enum class Kind { PointMass, UniformDensity };
    Kind kind = Kind::PointMass;
    double s1 = 0.0;  // tau for a point mass
    double s2 = 0.0;  // unused for a point mass

    static BasisElement point_mass(double tau);
    static BasisElement uniform_density(double s1, double s2);

    // Stieltjes transform of the measure at z: 1/(tau - z) or log((s2 - z)/(s1 - z)).
    cplx operator()(cplx z) const;

    bool operator==(const BasisElement&) const = default;
};

struct AdHocBasis {
    bool includes_constant = true;
    std::vector<BasisElement> elements;
    std::vector<double> taus;
    // Candidate taus dropped for being non-positive.
    std::size_t discarded = 0;

    std::size_t columns() const { return elements.size() + (includes_constant ? 1 : 0); }
};

// Point masses at every tau and uniform densities between consecutive points of
// the grid formed by the taus and the midpoints of adjacent taus. The taus are
// the positive real parts and the imaginary parts of the nodes plus extra_taus.
AdHocBasis build_adhoc_basis(const SampleSet& s, std::span<const double> extra_taus = {});

// n x columns matrix of basis functions at the nodes; the constant comes first.
ComplexMatrix basis_matrix(const AdHocBasis& b, std::span<const cplx> nodes);

struct Projection {
    RealVector x;     // nonnegative coefficients, constant first
    ComplexVector p;  // basis_matrix * x
    double objective = 0.0;  // sum |p_j - w_j|^2
};

// Nonnegative least squares on real and imaginary parts stacked.
Projection project(const SampleSet& s, const AdHocBasis& b);

struct CapriniCertificate {
    ComplexVector residuals;  // p_j - w_j
    ScanResult scan;          // C(t) on [0, T]
    double T = 0.0;
    bool T_fallback = false;  // Re sum delta conj(z) too small for the bound
    bool gamma_positive = false;
    double sum_residual_real = 0.0;  // Re sum delta_j
    double min_value = 0.0;
    double scale = 1.0;              // max |w_j|
    double tol = 1e-9;
    std::vector<double> support;
    std::vector<double> support_values;  // C at the support points
    bool certified = false;
};

// C(t) = Re sum_j (p_j - w_j) / (t - conj z_j).
double caprini_value(const SampleSet& s, std::span<const cplx> p, double t);
double caprini_derivative(const SampleSet& s, std::span<const cplx> p, double t);

struct CapriniOptions {
    double tol_cert = 1e-9;
    bool gamma_positive = false;
    ScanOptions scan;  // linear_until <= 0 selects 0.1 min |z_j|
};

// Scans C on [0, T] and checks nonnegativity, |C| at the support points and,
// when gamma_positive, Re sum delta = 0.
CapriniCertificate caprini(const SampleSet& s, std::span<const cplx> p, std::span<const double> support,
                           const CapriniOptions& opts = {});

// Support points used for the data correction: local minima at t > 0 whose
// value lies below threshold_rtol * scale.
std::vector<double> select_support(const CapriniCertificate& cert, double threshold_rtol = 1e-6);

// Minimum-norm dw such that the certificate for w + dw vanishes with zero
// slope at each support point, plus the gamma row and the t = 0 row as needed.
ComplexVector alternative_data(const SampleSet& s, std::span<const cplx> p, const CapriniCertificate& cert);

struct FitOptions {
    int max_augment = 3;
    double tol_cert = 1e-9;
    int max_datafix = 2;
    bool extract_spectrum = true;
    double feasibility_tol = 1e-10;
    double improvement_rtol = 1e-12;
    double support_rtol = 1e-6;
    int max_reprojections = 40;
    // Augmentation rounds used when re-projecting stalled reduced data.
    int reprojection_augment = 3;
    ScanOptions scan{2000, 0.0, 1e-12};
};

struct FitDiagnostics {
    int augment_rounds = 0;
    int datafix_rounds = 0;
    std::vector<double> objective_history;
    int reprojections = 0;
    bool interpolation_complete = true;
    // Largest relative change made to reduced data by re-projection.
    double reprojection_change = 0.0;
    // Steps taken before the first re-projection; the chain reproduces the
    // projected values at these leading nodes exactly.
    std::size_t unperturbed_steps = 0;
    double node_residual = 0.0;  // max |f*(z_j) - p_j| / |p_j|
    bool spectrum_ok = false;
    std::vector<std::string> messages;
};

struct FitResult {
    SampleSet data;
    ComplexVector projected;
    RealVector coefficients;
    AdHocBasis basis;
    ComplexVector alternative_data;
    ComplexVector dw;
    InterpolantChain interpolant;
    RationalStieltjes rational;
    CapriniCertificate initial_certificate;  // ad-hoc basis only
    CapriniCertificate certificate;          // against the alternative data
    double rho = 0.0;
    FitDiagnostics diagnostics;

    bool certified() const { return certificate.certified; }
};

FitResult fit(const SampleSet& s, const FitOptions& opts = {});

// Interpolates s, re-projecting the reduced data onto the ad-hoc cone whenever
// round-off pushes it out of the interpolation body.
InterpolationOutcome interpolate_with_reprojection(const SampleSet& s, const FitOptions& opts,
                                                   FitDiagnostics* diag = nullptr);

}  // namespace stieltjes
