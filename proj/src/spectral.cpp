#include "stieltjes/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "stieltjes/numerics.hpp"

namespace stieltjes {

namespace {

constexpr double kShrink = 1e-12;
constexpr double kMergeRtol = 1e-12;

// phi(x) = x g(x) + x - tstar, expanded so that -sigma0/x * x does not round.
double phi(const RationalStieltjes& g, double tstar, double x)
{
    double v = x * (g.gamma() + 1.0) - g.sigma0() - tstar;
    for (const Pole& p : g.poles())
        v += p.sigma * x / (p.t - x);
    return v;
}

// Residue of f at a root tau of phi. There g(tau) = tstar/tau - 1, so
//   Num(tau) = (tstar/tau - 1)(gammastar tau - sigmaupper) - sigmastar,
//   phi'(tau) = g + tau g' + 1 = tstar/tau + tau g'(tau),
// which avoids evaluating g next to its poles.
double residue(const RationalStieltjes& g, const StepParams& s, double tau)
{
    const double num = (s.tstar / tau - 1.0) * (s.gammastar * tau - s.sigmaupper) - s.sigmastar;
    const double dphi = s.tstar / tau + tau * g.derivative(tau);
    return -num / dphi;
}

// Log-coordinate end point next to a pole at exp(u_pole), moved by a fraction
// of the interval toward its interior until phi has the required sign.
double end_near_pole(const std::function<double(double)>& h, double u_pole, double width, int dir,
                     bool want_negative)
{
    for (double frac : {kShrink, 1e-14, 1e-16}) {
        const double u = u_pole + dir * frac * width;
        if (u == u_pole)
            break;
        const double v = h(u);
        if (want_negative ? v <= 0.0 : v >= 0.0)
            return u;
    }
    const double u = std::nextafter(u_pole, dir > 0 ? std::numeric_limits<double>::infinity()
                                                    : -std::numeric_limits<double>::infinity());
    return u;
}

}  // namespace

RationalStieltjes step_lift(const RationalStieltjes& g, const StepParams& step, LiftDiagnostics* diag)
{
    const double gg = g.gamma();
    const double s0 = g.sigma0();
    const auto& t = g.poles();
    const std::size_t n = t.size();

    const double gamma_f = step.gammastar * gg / (gg + 1.0);
    const double nu0 = s0 * step.sigmaupper / (s0 + step.tstar);

    double sum_sigma = s0;
    for (const Pole& p : t)
        sum_sigma += p.sigma;
    const double tmax = std::max(n > 0 ? 2.0 * t.back().t : 0.0, (step.tstar + 2.0 * sum_sigma) / (gg + 1.0));
    if (diag)
        diag->tmax = tmax;

    std::vector<double> taus;
    taus.reserve(n + 1);
    if (n == 0) {
        // phi is linear: x (gamma_g + 1) - sigma0 - tstar.
        taus.push_back((s0 + step.tstar) / (gg + 1.0));
    } else {
        auto h = [&](double u) { return phi(g, step.tstar, std::exp(u)); };
        for (std::size_t k = 0; k <= n; ++k) {
            double ua, ub;
            if (k == 0) {
                double x = t[0].t * 1e-8;
                while (phi(g, step.tstar, x) > 0.0) {
                    x *= 1e-4;
                    if (x < 1e-300)
                        throw SpectralError("no sign change of phi next to 0 when lifting a step");
                }
                ua = std::log(x);
            } else {
                const double lo = std::log(t[k - 1].t);
                const double width = k < n ? std::log(t[k].t) - lo : 1.0;
                ua = end_near_pole(h, lo, width, +1, true);
            }
            if (k < n) {
                const double hi = std::log(t[k].t);
                const double lo = k > 0 ? std::log(t[k - 1].t) : hi - 1.0;
                ub = end_near_pole(h, hi, hi - lo, -1, false);
            } else {
                double x = tmax;
                int grow = 0;
                while (phi(g, step.tstar, x) < 0.0) {
                    x *= 2.0;
                    if (++grow > 60)
                        throw SpectralError("phi stays negative beyond the last pole when lifting a step");
                }
                ub = std::log(x);
            }
            double u;
            try {
                u = brent_root(h, ua, ub, 1e-14);
            } catch (const BracketError& e) {
                std::ostringstream msg;
                msg << "pole " << k << " of the lifted function could not be bracketed on ["
                    << std::exp(e.a()) << ", " << std::exp(e.b()) << "]: phi = " << e.fa() << ", "
                    << e.fb();
                throw SpectralError(msg.str());
            }
            taus.push_back(std::exp(u));
        }
    }

    for (std::size_t k = 0; k < taus.size(); ++k) {
        const bool below = k == 0 ? taus[k] > 0.0 : taus[k] > t[k - 1].t;
        const bool above = k < n ? taus[k] < t[k].t : true;
        if (!(below && above)) {
            std::ostringstream msg;
            msg << "lifted pole " << taus[k] << " breaks interlacing with the previous level";
            throw SpectralError(msg.str());
        }
    }

    std::vector<Pole> poles;
    poles.reserve(taus.size());
    for (double tau : taus) {
        const double nu = residue(g, step, tau);
        if (!(nu > 0.0) || !std::isfinite(nu)) {
            std::ostringstream msg;
            msg << "non-positive weight " << nu << " at lifted pole " << tau;
            throw SpectralError(msg.str());
        }
        if (!poles.empty() && tau - poles.back().t < kMergeRtol * tau) {
            Pole& q = poles.back();
            q.t = (q.t * q.sigma + tau * nu) / (q.sigma + nu);
            q.sigma += nu;
            if (diag)
                ++diag->merged;
            continue;
        }
        poles.push_back({tau, nu});
    }
    return RationalStieltjes(gamma_f, nu0, std::move(poles));
}

RationalStieltjes extract(const InterpolantChain& c, ExtractDiagnostics* diag)
{
    RationalStieltjes f = c.terminal;
    for (auto it = c.steps.rbegin(); it != c.steps.rend(); ++it) {
        LiftDiagnostics ld;
        f = step_lift(f, *it, &ld);
        if (diag) {
            ++diag->lifts;
            diag->merged += ld.merged;
        }
    }
    return f;
}

}  // namespace stieltjes
