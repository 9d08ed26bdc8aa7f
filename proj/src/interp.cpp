#include "stieltjes/interp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stieltjes {

namespace {

constexpr double kEarlyExitRtol = 1e-13;
constexpr double kDegenerateMatchRtol = 1e-6;

struct LevelOutput {
    std::vector<ComplexSample> samples;
    std::vector<double> refs;
    std::optional<std::size_t> early_exit;
};

// Maps samples 1..n-1 through the step built on sample 0. refs[j] carries the
// magnitude a value would have without cancellation; it bounds the round-off.
LevelOutput apply_step(const SampleSet& s, const StepParams& p, const std::vector<double>& refs)
{
    LevelOutput out;
    for (std::size_t j = 1; j < s.size(); ++j) {
        const cplx z = s[j].node;
        const cplx w = s[j].value;
        const cplx l11 = p.tstar - z;
        const cplx l21 = z;
        const cplx l22 = p.sigmaupper - p.gammastar * z;
        const cplx num = l11 * w - p.sigmastar;
        const cplx den = w * l21 + l22;
        if (std::abs(den) < kEarlyExitRtol * (std::abs(w * l21) + std::abs(l22))) {
            out.early_exit = j;
            return out;
        }
        out.samples.push_back({z, num / den});
        out.refs.push_back((std::abs(l11) * refs[j] + p.sigmastar) / std::abs(den));
    }
    return out;
}

// Largest relative error of the chain steps[0..k) + terminal over s[from..].
double max_residual(const std::vector<StepParams>& steps, std::size_t k, const RationalStieltjes& terminal,
                    const SampleSet& s, std::size_t from)
{
    double worst = 0.0;
    for (std::size_t j = from; j < s.size(); ++j) {
        const cplx z = s[j].node;
        cplx g = terminal(z);
        for (std::size_t i = k; i-- > 0;) {
            const cplx den = z * g + z - steps[i].tstar;
            if (den == cplx(0.0, 0.0))
                return std::numeric_limits<double>::infinity();
            g = (g * (steps[i].gammastar * z - steps[i].sigmaupper) - steps[i].sigmastar) / den;
        }
        const double w = std::abs(s[j].value);
        worst = std::max(worst, std::abs(g - s[j].value) / std::max(w, std::numeric_limits<double>::min()));
    }
    return worst;
}

}  // namespace

cplx StepParams::forward(cplx z, cplx f) const
{
    return ((tstar - z) * f - sigmastar) / (z * f + sigmaupper - gammastar * z);
}

cplx StepParams::backward(cplx z, cplx g) const
{
    const cplx den = z * g + z - tstar;
    if (den == cplx(0.0, 0.0)) {
        std::ostringstream msg;
        msg << "vanishing denominator in the interpolant at z = " << z << " (corrupted chain)";
        throw DomainError(msg.str());
    }
    return (g * (gammastar * z - sigmaupper) - sigmastar) / den;
}

StepParams step_params(cplx z1, cplx w1)
{
    if (!(z1.imag() > 0.0))
        throw DomainError("step node must lie in the open upper half-plane");
    const double im_w = w1.imag();
    const double im_zw = (z1 * w1).imag();
    if (!(im_w > 0.0)) {
        std::ostringstream msg;
        msg << "Im w1 = " << im_w << " is not positive: the interpolant is the constant " << w1.real();
        throw DegenerateStepError(msg.str());
    }
    if (!(im_zw > 0.0)) {
        std::ostringstream msg;
        msg << "Im(z1 w1) = " << im_zw << " is not positive: the interpolant is -sigma/z with sigma = "
            << -(z1 * w1).real();
        throw DegenerateStepError(msg.str());
    }
    StepParams p;
    p.node = z1;
    p.value = w1;
    p.tstar = im_zw / im_w;
    p.sigmastar = std::norm(w1) * z1.imag() / im_w;
    p.gammastar = im_zw / z1.imag();
    p.sigmaupper = std::norm(z1) * im_w / z1.imag();
    return p;
}

const char* terminal_name(TerminalKind k)
{
    switch (k) {
    case TerminalKind::Zero: return "zero";
    case TerminalKind::Constant: return "constant";
    case TerminalKind::Pole0: return "pole0";
    case TerminalKind::EarlyExit: return "early_exit";
    }
    return "unknown";
}

cplx eval_chain(const InterpolantChain& c, cplx z)
{
    cplx g = c.terminal(z);
    for (auto it = c.steps.rbegin(); it != c.steps.rend(); ++it)
        g = it->backward(z, g);
    return g;
}

std::variant<Reduction, EarlyExit> reduce(const SampleSet& s)
{
    if (s.empty())
        throw DomainError("reduce needs at least one sample");
    const StepParams p = step_params(s[0].node, s[0].value);
    std::vector<double> refs;
    for (const auto& smp : s)
        refs.push_back(std::abs(smp.value));
    LevelOutput lv = apply_step(s, p, refs);
    if (lv.early_exit)
        return EarlyExit{RationalStieltjes(p.gammastar, p.sigmaupper, {}), *lv.early_exit};
    Reduction r{p, {}};
    if (!lv.samples.empty())
        r.remainder = SampleSet(std::move(lv.samples));
    return r;
}

InterpolantChain append(const InterpolantChain& head, const InterpolantChain& tail)
{
    InterpolantChain out = head;
    out.steps.insert(out.steps.end(), tail.steps.begin(), tail.steps.end());
    out.terminal = tail.terminal;
    out.terminal_kind = tail.terminal_kind;
    return out;
}

InterpolationOutcome continue_interpolation(const SampleSet& s, const InterpolationOptions& opts)
{
    InterpolationOutcome out;
    out.chain.terminal = RationalStieltjes();
    out.chain.terminal_kind = TerminalKind::Zero;

    SampleSet cur = s;
    std::vector<double> refs;
    for (const auto& smp : cur)
        refs.push_back(std::abs(smp.value));
    // levels[k]: reduced data after k steps, standing for s[k..].
    std::vector<SampleSet> levels{cur};

    // Exact data on the boundary of the body can fail the feasibility check
    // through round-off alone. Every further step is still a valid Stieltjes
    // step, so the recursion goes on, and the finished chain is kept only if
    // it reproduces s.
    std::optional<std::size_t> gate_level;
    std::string gate_reason;

    // Longest prefix that, with a simple terminal, already reproduces s.
    auto close = [&]() {
        for (std::size_t k = out.chain.steps.size() + 1; k-- > 0;) {
            const SampleSet& lv = levels[k];
            double c = 0.0, sigma = 0.0;
            for (const auto& smp : lv) {
                c += smp.value.real();
                sigma -= (smp.node * smp.value).real();
            }
            const double m = static_cast<double>(std::max<std::size_t>(lv.size(), 1));
            const std::pair<RationalStieltjes, TerminalKind> cands[] = {
                {RationalStieltjes(), TerminalKind::Zero},
                {RationalStieltjes::constant(std::max(0.0, c / m)), TerminalKind::Constant},
                {RationalStieltjes(0.0, std::max(0.0, sigma / m), {}), TerminalKind::Pole0},
            };
            for (const auto& [cand, kind] : cands)
                if (max_residual(out.chain.steps, k, cand, s, k) <= opts.terminal_match_rtol) {
                    out.chain.steps.resize(k);
                    out.chain.terminal = cand;
                    out.chain.terminal_kind = kind;
                    return true;
                }
        }
        return false;
    };

    auto stall = [&](const std::string& why) {
        if (close())
            return;
        out.complete = false;
        if (gate_level) {
            out.chain.steps.resize(*gate_level);
            out.chain.terminal = RationalStieltjes();
            out.chain.terminal_kind = TerminalKind::Zero;
            out.stalled = levels[*gate_level];
            out.reason = gate_reason;
        } else {
            out.stalled = cur;
            out.reason = why;
        }
    };

    auto finish = [&]() {
        if (gate_level &&
            max_residual(out.chain.steps, out.chain.steps.size(), out.chain.terminal, s, 0) > opts.terminal_match_rtol)
            stall(gate_reason);
    };

    while (!cur.empty()) {
        const std::size_t m = cur.size();

        bool all_zero = true;
        for (std::size_t j = 0; j < m; ++j)
            if (std::abs(cur[j].value) > opts.zero_rtol * refs[j]) {
                all_zero = false;
                break;
            }
        if (all_zero)
            break;

        const cplx z1 = cur[0].node;
        const cplx w1 = cur[0].value;
        const bool flat_w = !(w1.imag() > opts.zero_rtol * refs[0]);
        const bool flat_zw = !((z1 * w1).imag() > opts.zero_rtol * std::abs(z1) * refs[0]);
        if (flat_w || flat_zw) {
            // One-point boundary: the only candidates are a constant or -sigma/z.
            RationalStieltjes cand;
            TerminalKind kind;
            if (flat_w && w1.real() >= -opts.zero_rtol * refs[0]) {
                cand = RationalStieltjes::constant(std::max(0.0, w1.real()));
                kind = TerminalKind::Constant;
            } else if (flat_zw && -(z1 * w1).real() >= -opts.zero_rtol * std::abs(z1) * refs[0]) {
                cand = RationalStieltjes(0.0, std::max(0.0, -(z1 * w1).real()), {});
                kind = TerminalKind::Pole0;
            } else {
                stall("first sample violates the one-point conditions");
                return out;
            }
            bool match = true;
            for (std::size_t j = 0; j < m; ++j)
                if (std::abs(cand(cur[j].node) - cur[j].value) >
                    kDegenerateMatchRtol * std::max(refs[j], std::abs(cur[j].value))) {
                    match = false;
                    break;
                }
            if (!match) {
                stall("boundary sample inconsistent with the remaining data");
                return out;
            }
            out.chain.terminal = cand;
            out.chain.terminal_kind = kind;
            finish();
            return out;
        }

        if (m > 1 && !gate_level) {
            const FeasibilityReport fr = feasibility(cur, opts.feasibility_tol);
            if (!fr.feasible) {
                if (close())
                    return out;
                std::ostringstream msg;
                msg << "reduced data of size " << m << " lost feasibility (lambda_min N = "
                    << fr.lambda_min_N << ", P = " << fr.lambda_min_P << ")";
                gate_level = out.chain.steps.size();
                gate_reason = msg.str();
            }
        }

        const StepParams p = step_params(z1, w1);
        LevelOutput lv = apply_step(cur, p, refs);
        if (lv.early_exit) {
            out.chain.terminal = RationalStieltjes(p.gammastar, p.sigmaupper, {});
            out.chain.terminal_kind = TerminalKind::EarlyExit;
            finish();
            return out;
        }
        out.chain.steps.push_back(p);
        cur = lv.samples.empty() ? SampleSet() : SampleSet(std::move(lv.samples));
        refs = std::move(lv.refs);
        levels.push_back(cur);
    }
    finish();
    return out;
}

InterpolationOutcome interpolate(const SampleSet& s, const InterpolationOptions& opts)
{
    if (s.empty())
        throw DomainError("interpolate needs at least one sample");
    const FeasibilityReport fr = feasibility(s, opts.feasibility_tol);
    if (!fr.feasible) {
        std::ostringstream msg;
        msg << "data lies outside the interpolation body (lambda_min N = " << fr.lambda_min_N
            << ", P = " << fr.lambda_min_P << ")";
        throw InfeasibleError(msg.str());
    }
    return continue_interpolation(s, opts);
}

}  // namespace stieltjes
