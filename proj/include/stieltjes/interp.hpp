#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stieltjes/core.hpp"

namespace stieltjes {

// The first sample sits on the boundary of the one-point conditions
// (Im w = 0 or Im(zw) = 0); the interpolant is then a constant or -sigma/z.
class DegenerateStepError : public DomainError {
public:
    using DomainError::DomainError;
};

// Data outside the interpolation body.
class InfeasibleError : public DomainError {
public:
    using DomainError::DomainError;
};

// Parameters of one fractional-linear step with alpha = -1:
//   f(z) = (g(z) (gammastar z - sigmaupper) - sigmastar) / (z g(z) + z - tstar).
struct StepParams {
    double tstar = 0.0;
    double sigmastar = 0.0;
    double gammastar = 0.0;
    double sigmaupper = 0.0;
    cplx node;
    cplx value;

    // Inverse map g = ((tstar - z) f - sigmastar) / (z f + sigmaupper - gammastar z).
    cplx forward(cplx z, cplx f) const;
    // f from g.
    cplx backward(cplx z, cplx g) const;
};

// Requires Im z1 > 0, Im w1 > 0 and Im(z1 w1) > 0.
StepParams step_params(cplx z1, cplx w1);

enum class TerminalKind {
    Zero,       // g = 0: decaying interpolant
    Constant,   // data consistent with a nonnegative constant
    Pole0,      // data consistent with -sigma0/z
    EarlyExit,  // vanishing denominator: f = gammastar - sigmaupper/z
};

const char* terminal_name(TerminalKind k);

struct InterpolantChain {
    std::vector<StepParams> steps;
    RationalStieltjes terminal;
    TerminalKind terminal_kind = TerminalKind::Zero;
};

cplx eval_chain(const InterpolantChain& c, cplx z);

struct Reduction {
    StepParams step;
    SampleSet remainder;  // size n - 1, transformed values
};

struct EarlyExit {
    RationalStieltjes function;  // gammastar - sigmaupper/z
    std::size_t trigger_index;   // sample whose denominator vanished
};

// One level of the recursion: consumes the first sample and maps the remaining
// values through the step. Early exit is signalled when some denominator
// |w L21 + L22| falls below 1e-13 (|w L21| + |L22|).
std::variant<Reduction, EarlyExit> reduce(const SampleSet& s);

struct InterpolationOptions {
    // Relative feasibility tolerance applied to each reduced data set.
    double feasibility_tol = 1e-10;
    // |value| below this fraction of the level's magnitude counts as zero.
    double zero_rtol = 1e-10;
    // Before giving up on reduced data, a prefix of the chain closed by a zero,
    // constant or -sigma/z terminal is accepted if it reproduces the remaining
    // input samples to this relative accuracy. This catches data whose degree
    // ran out with round-off left over.
    double terminal_match_rtol = 1e-9;
};

// Result of interpolate(). When the recursion runs into data that lost
// feasibility through round-off, `complete` is false, `chain` holds the steps
// taken so far and `stalled` the offending reduced data; the caller can
// re-project it and resume with append().
struct InterpolationOutcome {
    InterpolantChain chain;
    bool complete = true;
    SampleSet stalled;
    std::string reason;
};

// Throws InfeasibleError if s itself fails the feasibility check.
InterpolationOutcome interpolate(const SampleSet& s, const InterpolationOptions& opts = {});

// Same, without the entry feasibility check (used to resume after re-projection).
InterpolationOutcome continue_interpolation(const SampleSet& s, const InterpolationOptions& opts = {});

// Continues `head` with the chain interpolating its stalled remainder.
InterpolantChain append(const InterpolantChain& head, const InterpolantChain& tail);

}  // namespace stieltjes
