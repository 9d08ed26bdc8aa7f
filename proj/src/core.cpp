#include "stieltjes/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace stieltjes {

namespace {

void validate(const std::vector<ComplexSample>& samples)
{
    if (samples.empty())
        throw DomainError("sample set must contain at least one sample");
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto& s = samples[j];
        if (!std::isfinite(s.node.real()) || !std::isfinite(s.node.imag()) ||
            !std::isfinite(s.value.real()) || !std::isfinite(s.value.imag())) {
            std::ostringstream msg;
            msg << "sample " << j << " has a non-finite node or value";
            throw DomainError(msg.str());
        }
        if (!(s.node.imag() > 0.0)) {
            std::ostringstream msg;
            msg << "node " << j << " = " << s.node << " is not in the open upper half-plane";
            throw DomainError(msg.str());
        }
    }
    for (std::size_t j = 0; j < samples.size(); ++j)
        for (std::size_t k = j + 1; k < samples.size(); ++k)
            if (samples[j].node == samples[k].node) {
                std::ostringstream msg;
                msg << "duplicate nodes at indices " << j << " and " << k;
                throw DomainError(msg.str());
            }
}

}  // namespace

SampleSet::SampleSet(std::vector<ComplexSample> samples) : samples_(std::move(samples))
{
    validate(samples_);
}

SampleSet::SampleSet(std::span<const cplx> nodes, std::span<const cplx> values)
{
    if (nodes.size() != values.size())
        throw DomainError("node and value counts differ");
    samples_.reserve(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j)
        samples_.push_back({nodes[j], values[j]});
    validate(samples_);
}

std::vector<cplx> SampleSet::nodes() const
{
    std::vector<cplx> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_)
        out.push_back(s.node);
    return out;
}

std::vector<cplx> SampleSet::values() const
{
    std::vector<cplx> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_)
        out.push_back(s.value);
    return out;
}

double SampleSet::max_abs_value() const
{
    double m = 0.0;
    for (const auto& s : samples_)
        m = std::max(m, std::abs(s.value));
    return m;
}

SampleSet SampleSet::with_values(std::span<const cplx> values) const
{
    if (values.size() != samples_.size())
        throw DomainError("value count does not match the sample set");
    SampleSet out = *this;
    for (std::size_t j = 0; j < values.size(); ++j)
        out.samples_[j].value = values[j];
    return out;
}

RationalStieltjes::RationalStieltjes(double gamma, double sigma0, std::vector<Pole> poles)
    : gamma_(gamma), sigma0_(sigma0), poles_(std::move(poles))
{
    if (!(gamma_ >= 0.0) || !std::isfinite(gamma_))
        throw DomainError("gamma must be a finite nonnegative number");
    if (!(sigma0_ >= 0.0) || !std::isfinite(sigma0_))
        throw DomainError("sigma0 must be a finite nonnegative number");
    double prev = 0.0;
    for (std::size_t j = 0; j < poles_.size(); ++j) {
        const auto& p = poles_[j];
        if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
            std::ostringstream msg;
            msg << "pole " << j << " has non-positive weight " << p.sigma;
            throw DomainError(msg.str());
        }
        if (!(p.t > prev) || !std::isfinite(p.t)) {
            std::ostringstream msg;
            msg << "pole locations must be positive and strictly increasing (pole " << j
                << " at t = " << p.t << ")";
            throw DomainError(msg.str());
        }
        prev = p.t;
    }
}

cplx RationalStieltjes::operator()(cplx z) const
{
    cplx sum = gamma_;
    if (sigma0_ > 0.0) {
        if (z == cplx(0.0, 0.0))
            throw PoleError("evaluation at the pole t = 0", 0.0);
        sum -= sigma0_ / z;
    }
    for (const auto& p : poles_) {
        const cplx d = p.t - z;
        if (d == cplx(0.0, 0.0)) {
            std::ostringstream msg;
            msg << "evaluation at the pole t = " << p.t;
            throw PoleError(msg.str(), p.t);
        }
        sum += p.sigma / d;
    }
    return sum;
}

double RationalStieltjes::derivative(double x) const
{
    double d = 0.0;
    if (sigma0_ > 0.0)
        d += sigma0_ / (x * x);
    for (const auto& p : poles_) {
        const double u = p.t - x;
        d += p.sigma / (u * u);
    }
    return d;
}

cplx eval_rational(const RationalStieltjes& f, cplx z)
{
    return f(z);
}

PickPair pick_matrices(const SampleSet& s)
{
    const auto n = static_cast<Eigen::Index>(s.size());
    PickPair out{ComplexMatrix(n, n), ComplexMatrix(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const cplx zj = s[j].node;
        const cplx wj = s[j].value;
        // Diagonal entries are real by construction: Im w / Im z and Im(zw) / Im z.
        out.N(j, j) = wj.imag() / zj.imag();
        out.P(j, j) = (zj * wj).imag() / zj.imag();
        for (Eigen::Index k = j + 1; k < n; ++k) {
            const cplx zk = s[k].node;
            const cplx wk = s[k].value;
            const cplx den = zj - std::conj(zk);
            const cplx nv = (wj - std::conj(wk)) / den;
            const cplx pv = (zj * wj - std::conj(zk * wk)) / den;
            out.N(j, k) = nv;
            out.N(k, j) = std::conj(nv);
            out.P(j, k) = pv;
            out.P(k, j) = std::conj(pv);
        }
    }
    return out;
}

double min_hermitian_eigenvalue(const ComplexMatrix& m)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw Error("Hermitian eigenvalue solver did not converge");
    return es.eigenvalues()(0);
}

FeasibilityReport feasibility(const SampleSet& s, double tol)
{
    if (!(tol > 0.0))
        throw DomainError("feasibility tolerance must be positive");
    const PickPair pp = pick_matrices(s);
    FeasibilityReport r;
    r.tolerance = tol;
    r.lambda_min_N = min_hermitian_eigenvalue(pp.N);
    r.lambda_min_P = min_hermitian_eigenvalue(pp.P);
    r.scale_N = std::max(1.0, pp.N.cwiseAbs().maxCoeff());
    r.scale_P = std::max(1.0, pp.P.cwiseAbs().maxCoeff());
    r.feasible = r.lambda_min_N >= -tol * r.scale_N && r.lambda_min_P >= -tol * r.scale_P;
    return r;
}

}  // namespace stieltjes
