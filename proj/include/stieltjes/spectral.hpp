#pragma once

#include <cstddef>

#include "stieltjes/core.hpp"
#include "stieltjes/interp.hpp"

namespace stieltjes {

// A lifted pole could not be bracketed, or the computed poles fail to
// interlace the previous ones.
class SpectralError : public Error {
public:
    using Error::Error;
};

struct LiftDiagnostics {
    // Pairs of new poles closer than 1e-12 relative that were merged.
    std::size_t merged = 0;
    // Upper bracket end used for the last pole.
    double tmax = 0.0;
};

// Spectral form of f = (g (gammastar z - sigmaupper) - sigmastar) / (z g + z - tstar).
// The poles of f are the roots of phi(x) = x g(x) + x - tstar, one in each of
// (0, t_1), (t_1, t_2), ..., (t_n, T_max].
RationalStieltjes step_lift(const RationalStieltjes& g, const StepParams& step,
                            LiftDiagnostics* diag = nullptr);

struct ExtractDiagnostics {
    std::size_t lifts = 0;
    std::size_t merged = 0;
};

// Folds the chain's terminal through its steps, last step first.
RationalStieltjes extract(const InterpolantChain& c, ExtractDiagnostics* diag = nullptr);

}  // namespace stieltjes
