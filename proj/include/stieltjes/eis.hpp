#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "stieltjes/core.hpp"

namespace stieltjes {

// Impedance conventions: a Stieltjes function f gives Z(omega) = f(-i omega).
// Samples use nodes z = i omega (omega = 2 pi f) and values w = conj(Z),
// which equals f(i omega) by conjugate symmetry.

enum class ModelKind { CPE, ZARC, HN, DHN };

struct ImpedanceModel {
    ModelKind kind = ModelKind::ZARC;
    double R = 1.0;     // R0 for DHN
    double tau = 1.0;   // tau1 for DHN
    double phi = 1.0;
    double psi = 1.0;
    double R_inf = 0.0;  // DHN only
    double tau2 = 1.0;   // DHN only

    static ImpedanceModel cpe(double R, double tau, double phi);
    static ImpedanceModel zarc(double R, double tau, double phi);
    static ImpedanceModel hn(double R, double tau, double phi, double psi);
    static ImpedanceModel dhn(double R_inf, double R0, double phi, double psi, double tau1, double tau2);
};

const char* model_name(ModelKind k);

// CPE  R/(i tau omega)^phi
// ZARC R/(1 + (i tau omega)^phi)
// HN   R/(1 + (i tau omega)^phi)^psi
// DHN  R_inf + HN(R0, tau1) + HN(R0, tau2)
cplx model_eval(const ImpedanceModel& m, double omega);

struct EisDataset {
    std::vector<double> frequencies;  // Hz, strictly increasing
    std::vector<cplx> impedances;     // ohms
    double noise_level = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// n log-spaced frequencies from fmin to fmax; each value is multiplied by
// 1 + noise (g1 + i g2)/sqrt(2) with standard normals drawn from Rng(seed),
// two per frequency in increasing frequency order.
EisDataset synth_dataset(const ImpedanceModel& m, double fmin, double fmax, int n, double noise,
                         std::uint64_t seed);

SampleSet to_samples(const EisDataset& d);
EisDataset from_samples(const SampleSet& s);

inline double node_to_frequency(cplx z) { return z.imag() / (2.0 * std::numbers::pi); }

// Z(omega) = f(-i omega).
cplx impedance(const RationalStieltjes& f, double omega);

struct RCElement {
    double R;
    double C;
};

struct VoigtCircuit {
    double R_inf = 0.0;
    std::optional<double> series_C;
    std::vector<RCElement> elements;

    // R_inf + 1/(i omega C_s) + sum R/(1 + i omega R C).
    cplx impedance(double omega) const;
};

VoigtCircuit to_voigt(const RationalStieltjes& f);
RationalStieltjes from_voigt(const VoigtCircuit& c);

}  // namespace stieltjes
