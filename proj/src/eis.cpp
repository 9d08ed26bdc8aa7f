#include "stieltjes/eis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "stieltjes/rng.hpp"

namespace stieltjes {

namespace {

void check_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be positive, got " << v;
        throw DomainError(msg.str());
    }
}

void check_unit(double v, const char* name)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie in [0, 1], got " << v;
        throw DomainError(msg.str());
    }
}

// (i x)^a on the principal branch, x > 0.
cplx ipow(double x, double a)
{
    return std::polar(std::pow(x, a), a * std::numbers::pi / 2.0);
}

cplx hn(double R, double tau, double phi, double psi, double omega)
{
    return R / std::pow(1.0 + ipow(tau * omega, phi), psi);
}

}  // namespace

ImpedanceModel ImpedanceModel::cpe(double R, double tau, double phi)
{
    ImpedanceModel m;
    m.kind = ModelKind::CPE;
    m.R = R;
    m.tau = tau;
    m.phi = phi;
    return m;
}

ImpedanceModel ImpedanceModel::zarc(double R, double tau, double phi)
{
    ImpedanceModel m = cpe(R, tau, phi);
    m.kind = ModelKind::ZARC;
    return m;
}

ImpedanceModel ImpedanceModel::hn(double R, double tau, double phi, double psi)
{
    ImpedanceModel m = cpe(R, tau, phi);
    m.kind = ModelKind::HN;
    m.psi = psi;
    return m;
}

ImpedanceModel ImpedanceModel::dhn(double R_inf, double R0, double phi, double psi, double tau1, double tau2)
{
    ImpedanceModel m = hn(R0, tau1, phi, psi);
    m.kind = ModelKind::DHN;
    m.R_inf = R_inf;
    m.tau2 = tau2;
    return m;
}

const char* model_name(ModelKind k)
{
    switch (k) {
    case ModelKind::CPE: return "cpe";
    case ModelKind::ZARC: return "zarc";
    case ModelKind::HN: return "hn";
    case ModelKind::DHN: return "dhn";
    }
    return "unknown";
}

cplx model_eval(const ImpedanceModel& m, double omega)
{
    check_positive(omega, "omega");
    check_positive(m.R, "R");
    check_positive(m.tau, "tau");
    check_unit(m.phi, "phi");
    switch (m.kind) {
    case ModelKind::CPE:
        return m.R / ipow(m.tau * omega, m.phi);
    case ModelKind::ZARC:
        return hn(m.R, m.tau, m.phi, 1.0, omega);
    case ModelKind::HN:
        check_unit(m.psi, "psi");
        return hn(m.R, m.tau, m.phi, m.psi, omega);
    case ModelKind::DHN:
        check_unit(m.psi, "psi");
        check_positive(m.tau2, "tau2");
        if (!(m.R_inf >= 0.0))
            throw DomainError("R_inf must be nonnegative");
        return m.R_inf + hn(m.R, m.tau, m.phi, m.psi, omega) + hn(m.R, m.tau2, m.phi, m.psi, omega);
    }
    throw DomainError("unknown impedance model");
}

void EisDataset::validate() const
{
    if (frequencies.empty())
        throw DomainError("dataset has no frequencies");
    if (frequencies.size() != impedances.size())
        throw DomainError("dataset frequencies and impedances differ in length");
    for (std::size_t j = 0; j < frequencies.size(); ++j) {
        if (!(frequencies[j] > 0.0) || !std::isfinite(frequencies[j])) {
            std::ostringstream msg;
            msg << "frequency " << j << " is not positive: " << frequencies[j];
            throw DomainError(msg.str());
        }
        if (j > 0 && !(frequencies[j] > frequencies[j - 1])) {
            std::ostringstream msg;
            msg << "frequencies must be strictly increasing (row " << j << ")";
            throw DomainError(msg.str());
        }
    }
}

EisDataset synth_dataset(const ImpedanceModel& m, double fmin, double fmax, int n, double noise,
                         std::uint64_t seed)
{
    check_positive(fmin, "fmin");
    if (!(fmax > fmin))
        throw DomainError("fmax must exceed fmin");
    if (n < 2)
        throw DomainError("a dataset needs at least 2 frequencies");
    if (!(noise >= 0.0))
        throw DomainError("noise level must be nonnegative");
    EisDataset d;
    d.noise_level = noise;
    d.seed = seed;
    Rng rng(seed);
    const double lmin = std::log10(fmin), lmax = std::log10(fmax);
    for (int j = 0; j < n; ++j) {
        double f = std::pow(10.0, lmin + (lmax - lmin) * j / (n - 1));
        if (j == 0)
            f = fmin;
        if (j == n - 1)
            f = fmax;
        const cplx Z = model_eval(m, 2.0 * std::numbers::pi * f);
        const double g1 = rng.normal();
        const double g2 = rng.normal();
        d.frequencies.push_back(f);
        d.impedances.push_back(Z * (1.0 + noise * cplx(g1, g2) / std::sqrt(2.0)));
    }
    return d;
}

SampleSet to_samples(const EisDataset& d)
{
    d.validate();
    std::vector<ComplexSample> out;
    for (std::size_t j = 0; j < d.frequencies.size(); ++j)
        out.push_back({cplx(0.0, 2.0 * std::numbers::pi * d.frequencies[j]), std::conj(d.impedances[j])});
    return SampleSet(std::move(out));
}

EisDataset from_samples(const SampleSet& s)
{
    EisDataset d;
    for (const auto& smp : s) {
        if (smp.node.real() != 0.0)
            throw DomainError("EIS samples must have purely imaginary nodes");
        d.frequencies.push_back(node_to_frequency(smp.node));
        d.impedances.push_back(std::conj(smp.value));
    }
    d.validate();
    return d;
}

cplx impedance(const RationalStieltjes& f, double omega)
{
    return f(cplx(0.0, -omega));
}

cplx VoigtCircuit::impedance(double omega) const
{
    const cplx iw(0.0, omega);
    cplx Z = R_inf;
    if (series_C)
        Z += 1.0 / (iw * *series_C);
    for (const auto& e : elements)
        Z += e.R / (1.0 + iw * e.R * e.C);
    return Z;
}

VoigtCircuit to_voigt(const RationalStieltjes& f)
{
    VoigtCircuit c;
    c.R_inf = f.gamma();
    if (f.sigma0() > 0.0)
        c.series_C = 1.0 / f.sigma0();
    for (const Pole& p : f.poles())
        c.elements.push_back({p.sigma / p.t, 1.0 / p.sigma});
    return c;
}

RationalStieltjes from_voigt(const VoigtCircuit& c)
{
    if (!(c.R_inf >= 0.0))
        throw DomainError("R_inf must be nonnegative");
    double sigma0 = 0.0;
    if (c.series_C) {
        check_positive(*c.series_C, "series capacitance");
        sigma0 = 1.0 / *c.series_C;
    }
    std::vector<Pole> poles;
    for (const auto& e : c.elements) {
        check_positive(e.R, "element resistance");
        check_positive(e.C, "element capacitance");
        const double sigma = 1.0 / e.C;
        poles.push_back({sigma / e.R, sigma});
    }
    std::sort(poles.begin(), poles.end(), [](const Pole& a, const Pole& b) { return a.t < b.t; });
    return RationalStieltjes(c.R_inf, sigma0, std::move(poles));
}

}  // namespace stieltjes
