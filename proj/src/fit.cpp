#include "stieltjes/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stieltjes/spectral.hpp"
#include "stieltjes/uncertainty.hpp"

namespace stieltjes {

namespace {

constexpr double kTauDedupRtol = 1e-12;
constexpr double kFallbackT = 1e3;
constexpr double kNegligibleMin = 1e-9;

std::span<const cplx> as_span(const ComplexVector& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

ComplexVector to_vector(const std::vector<cplx>& v)
{
    ComplexVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

double max_abs_node(const SampleSet& s)
{
    double m = 0.0;
    for (const auto& smp : s)
        m = std::max(m, std::abs(smp.node));
    return m;
}

double min_abs_node(const SampleSet& s)
{
    double m = std::abs(s[0].node);
    for (const auto& smp : s)
        m = std::min(m, std::abs(smp.node));
    return m;
}

double value_scale(const SampleSet& s)
{
    const double m = s.max_abs_value();
    return m > 0.0 ? m : 1.0;
}

void add_unique(std::vector<double>& v, double t)
{
    for (double u : v)
        if (std::abs(u - t) <= kTauDedupRtol * std::max(std::abs(u), std::abs(t)))
            return;
    v.push_back(t);
}

// Basis of the new construction extended by every element of `old`, so that
// the cone never shrinks between augmentation rounds.
AdHocBasis merge_basis(AdHocBasis fresh, const AdHocBasis& old)
{
    for (const auto& e : old.elements)
        if (std::find(fresh.elements.begin(), fresh.elements.end(), e) == fresh.elements.end())
            fresh.elements.push_back(e);
    return fresh;
}

// Appends the real-stacked row of  Re sum_j dw_j c_j.
void push_row(std::vector<std::vector<double>>& rows, std::vector<double>& rhs,
              const std::vector<cplx>& c, double value)
{
    const std::size_t n = c.size();
    std::vector<double> row(2 * n);
    for (std::size_t j = 0; j < n; ++j) {
        row[j] = c[j].real();
        row[n + j] = -c[j].imag();
    }
    rows.push_back(std::move(row));
    rhs.push_back(value);
}

}  // namespace

BasisElement BasisElement::point_mass(double tau)
{
    if (!(tau >= 0.0) || !std::isfinite(tau))
        throw DomainError("point mass location must be a finite nonnegative number");
    return {Kind::PointMass, tau, 0.0};
}

BasisElement BasisElement::uniform_density(double s1, double s2)
{
    if (!(s1 >= 0.0) || !(s2 > s1) || !std::isfinite(s2))
        throw DomainError("uniform density needs 0 <= s1 < s2");
    return {Kind::UniformDensity, s1, s2};
}

cplx BasisElement::operator()(cplx z) const
{
    if (kind == Kind::PointMass)
        return 1.0 / (s1 - z);
    return std::log((s2 - z) / (s1 - z));
}

AdHocBasis build_adhoc_basis(const SampleSet& s, std::span<const double> extra_taus)
{
    AdHocBasis b;
    std::vector<double> cand;
    auto consider = [&](double t, bool allow_zero) {
        if ((t > 0.0 || (allow_zero && t == 0.0)) && std::isfinite(t))
            cand.push_back(t);
        else
            ++b.discarded;
    };
    for (const auto& smp : s) {
        consider(smp.node.real(), false);
        consider(smp.node.imag(), false);
    }
    // An extra tau at 0 (a Caprini minimum at the origin) gives the -1/z term.
    for (double t : extra_taus)
        consider(t, true);
    std::sort(cand.begin(), cand.end());
    for (double t : cand)
        if (b.taus.empty() || t - b.taus.back() > kTauDedupRtol * t)
            b.taus.push_back(t);

    std::vector<double> grid;
    for (std::size_t i = 0; i < b.taus.size(); ++i) {
        grid.push_back(b.taus[i]);
        if (i + 1 < b.taus.size())
            grid.push_back(0.5 * (b.taus[i] + b.taus[i + 1]));
    }
    for (double t : b.taus)
        b.elements.push_back(BasisElement::point_mass(t));
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        b.elements.push_back(BasisElement::uniform_density(grid[i], grid[i + 1]));
    return b;
}

ComplexMatrix basis_matrix(const AdHocBasis& b, std::span<const cplx> nodes)
{
    const auto n = static_cast<Eigen::Index>(nodes.size());
    ComplexMatrix A(n, static_cast<Eigen::Index>(b.columns()));
    Eigen::Index c = 0;
    if (b.includes_constant)
        A.col(c++).setOnes();
    for (const auto& e : b.elements) {
        for (Eigen::Index j = 0; j < n; ++j)
            A(j, c) = e(nodes[static_cast<std::size_t>(j)]);
        ++c;
    }
    return A;
}

Projection project(const SampleSet& s, const AdHocBasis& b)
{
    if (b.columns() == 0)
        throw DomainError("project: empty basis");
    const std::vector<cplx> nodes = s.nodes();
    const ComplexMatrix A = basis_matrix(b, nodes);
    const Eigen::Index n = A.rows();
    RealMatrix Ar(2 * n, A.cols());
    Ar.topRows(n) = A.real();
    Ar.bottomRows(n) = A.imag();
    RealVector br(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        br(j) = s[static_cast<std::size_t>(j)].value.real();
        br(n + j) = s[static_cast<std::size_t>(j)].value.imag();
    }
    Projection pr;
    pr.x = nnls(Ar, br);
    pr.p = A * pr.x.cast<cplx>();
    pr.objective = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        pr.objective += std::norm(pr.p(j) - s[static_cast<std::size_t>(j)].value);
    return pr;
}

double caprini_value(const SampleSet& s, std::span<const cplx> p, double t)
{
    double c = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
        c += ((p[j] - s[j].value) / (t - std::conj(s[j].node))).real();
    return c;
}

double caprini_derivative(const SampleSet& s, std::span<const cplx> p, double t)
{
    double c = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        const cplx d = t - std::conj(s[j].node);
        c -= ((p[j] - s[j].value) / (d * d)).real();
    }
    return c;
}

CapriniCertificate caprini(const SampleSet& s, std::span<const cplx> p, std::span<const double> support,
                           const CapriniOptions& opts)
{
    if (p.size() != s.size())
        throw DomainError("caprini: projection and data differ in length");
    const std::size_t n = s.size();
    CapriniCertificate cert;
    cert.scale = value_scale(s);
    cert.tol = opts.tol_cert;
    cert.gamma_positive = opts.gamma_positive;
    cert.residuals.resize(static_cast<Eigen::Index>(n));
    double sum_dz = 0.0, num = 0.0;
    bool all_zero = true;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx d = p[j] - s[j].value;
        cert.residuals(static_cast<Eigen::Index>(j)) = d;
        if (d != cplx(0.0, 0.0))
            all_zero = false;
        cert.sum_residual_real += d.real();
        sum_dz += (d * std::conj(s[j].node)).real();
        num += 2.0 * std::abs(d) * std::abs(s[j].node);
    }
    cert.support.assign(support.begin(), support.end());
    if (all_zero) {
        cert.support_values.assign(cert.support.size(), 0.0);
        cert.certified = true;
        return cert;
    }

    const double zmax = max_abs_node(s);
    if (std::abs(sum_dz) < 1e-14 * cert.scale * zmax) {
        cert.T = kFallbackT * zmax;
        cert.T_fallback = true;
    } else {
        cert.T = (num / std::abs(sum_dz) + 1.0) * zmax;
    }
    ScanOptions so = opts.scan;
    if (!(so.linear_until > 0.0))
        so.linear_until = 0.1 * min_abs_node(s);
    auto C = [&](double t) { return caprini_value(s, p, t); };
    cert.scan = scan_local_minima(C, 0.0, cert.T, so);

    cert.min_value = *std::min_element(cert.scan.values.begin(), cert.scan.values.end());
    for (const auto& m : cert.scan.minima)
        cert.min_value = std::min(cert.min_value, m.value);
    const double tol = opts.tol_cert * cert.scale;
    bool ok = cert.min_value >= -tol;
    for (double t : cert.support) {
        const double v = C(t);
        cert.support_values.push_back(v);
        if (std::abs(v) > tol)
            ok = false;
    }
    if (cert.gamma_positive && std::abs(cert.sum_residual_real) > tol)
        ok = false;
    cert.certified = ok;
    return cert;
}

std::vector<double> select_support(const CapriniCertificate& cert, double threshold_rtol)
{
    std::vector<double> out;
    for (const auto& m : cert.scan.minima)
        if (m.location > 0.0 && m.value < threshold_rtol * cert.scale)
            out.push_back(m.location);
    return out;
}

ComplexVector alternative_data(const SampleSet& s, std::span<const cplx> p, const CapriniCertificate& cert)
{
    const std::size_t n = s.size();
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<cplx> c(n);
    for (double t : cert.support) {
        if (!(t > 0.0))
            continue;
        // Zero slope. The refined minimum is only located to about sqrt(eps),
        // so the residual slope is cancelled rather than assumed to vanish.
        for (std::size_t j = 0; j < n; ++j) {
            const cplx d = t - std::conj(s[j].node);
            c[j] = 1.0 / (d * d);
        }
        push_row(rows, rhs, c, -caprini_derivative(s, p, t));
        for (std::size_t j = 0; j < n; ++j)
            c[j] = 1.0 / (t - std::conj(s[j].node));
        push_row(rows, rhs, c, caprini_value(s, p, t));
    }
    if (cert.gamma_positive) {
        std::fill(c.begin(), c.end(), cplx(1.0, 0.0));
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            r += (p[j] - s[j].value).real();
        push_row(rows, rhs, c, r);
    }
    const double c0 = caprini_value(s, p, 0.0);
    if (c0 < 0.0) {
        for (std::size_t j = 0; j < n; ++j)
            c[j] = 1.0 / std::conj(s[j].node);
        push_row(rows, rhs, c, -c0);
    }
    ComplexVector dw = ComplexVector::Zero(static_cast<Eigen::Index>(n));
    if (rows.empty())
        return dw;
    RealMatrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(2 * n));
    RealVector b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k < 2 * n; ++k)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        b(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    const RealVector u = min_norm_lsq(A, b);
    for (std::size_t j = 0; j < n; ++j)
        dw(static_cast<Eigen::Index>(j)) = cplx(u(static_cast<Eigen::Index>(j)), u(static_cast<Eigen::Index>(n + j)));
    return dw;
}

namespace {

struct AugmentedProjection {
    AdHocBasis basis;
    Projection projection;
    CapriniCertificate initial;
    CapriniCertificate certificate;
};

// Ad-hoc projection followed by up to `rounds` augmentations with the local
// minima of the Caprini function.
AugmentedProjection augmented_projection(const SampleSet& s, int rounds, const FitOptions& opts,
                                         CapriniOptions co, FitDiagnostics* dg)
{
    AugmentedProjection a;
    std::vector<double> extra;
    a.basis = build_adhoc_basis(s, extra);
    a.projection = project(s, a.basis);
    if (dg)
        dg->objective_history.push_back(a.projection.objective);
    auto certify = [&](const Projection& pr) {
        co.gamma_positive = pr.x(0) > 0.0;
        const std::span<const cplx> p(pr.p.data(), static_cast<std::size_t>(pr.p.size()));
        const CapriniCertificate c = caprini(s, p, {}, co);
        return caprini(s, p, select_support(c, opts.support_rtol), co);
    };
    a.certificate = certify(a.projection);
    a.initial = a.certificate;

    for (int round = 0; round < rounds && !a.certificate.certified; ++round) {
        const std::size_t before = extra.size();
        for (const auto& m : a.certificate.scan.minima)
            add_unique(extra, m.location);
        if (extra.size() == before)
            break;
        AdHocBasis nb = merge_basis(build_adhoc_basis(s, extra), a.basis);
        Projection np = project(s, nb);
        const double old = a.projection.objective;
        if (dg) {
            ++dg->augment_rounds;
            dg->objective_history.push_back(np.objective);
        }
        if (np.objective <= old) {
            a.basis = std::move(nb);
            a.projection = std::move(np);
            a.certificate = certify(a.projection);
        }
        if ((old - a.projection.objective) / std::max(old, 1e-300) < opts.improvement_rtol)
            break;
    }
    return a;
}

}  // namespace

InterpolationOutcome interpolate_with_reprojection(const SampleSet& s, const FitOptions& opts,
                                                   FitDiagnostics* diag)
{
    InterpolationOptions io;
    io.feasibility_tol = opts.feasibility_tol;
    InterpolationOutcome out = continue_interpolation(s, io);
    InterpolantChain chain = out.chain;
    if (diag)
        diag->unperturbed_steps = out.chain.steps.size();
    int k = 0;
    while (!out.complete && k < opts.max_reprojections) {
        const SampleSet st = out.stalled;
        CapriniOptions co;
        co.tol_cert = opts.tol_cert;
        co.scan = opts.scan;
        const Projection pr = augmented_projection(st, opts.reprojection_augment, opts, co, nullptr).projection;
        const double ref = st.max_abs_value();
        double change = 0.0;
        for (std::size_t j = 0; j < st.size(); ++j)
            change = std::max(change, std::abs(pr.p(static_cast<Eigen::Index>(j)) - st[j].value));
        if (diag) {
            diag->reprojection_change = std::max(diag->reprojection_change, ref > 0.0 ? change / ref : change);
            std::ostringstream msg;
            msg << "re-projected " << st.size() << " reduced samples: " << out.reason;
            diag->messages.push_back(msg.str());
        }
        ++k;
        out = continue_interpolation(st.with_values(as_span(pr.p)), io);
        chain = append(chain, out.chain);
    }
    if (diag) {
        diag->reprojections += k;
        diag->interpolation_complete = out.complete;
        if (!out.complete)
            diag->messages.push_back("interpolation stopped after the re-projection cap: " + out.reason);
    }
    out.chain = std::move(chain);
    return out;
}

FitResult fit(const SampleSet& s, const FitOptions& opts)
{
    if (s.empty())
        throw DomainError("fit needs at least one sample");
    FitResult r;
    r.data = s;
    const std::size_t n = s.size();
    const double scale = value_scale(s);
    const std::vector<cplx> w = s.values();
    FitDiagnostics& dg = r.diagnostics;

    CapriniOptions co;
    co.tol_cert = opts.tol_cert;
    co.scan = opts.scan;

    auto certify = [&](const SampleSet& data, const ComplexVector& p, const std::vector<double>& support) {
        return caprini(data, as_span(p), support, co);
    };

    const FeasibilityReport fr = feasibility(s, opts.feasibility_tol);
    if (fr.feasible) {
        // Already inside the interpolation body: the data is its own projection.
        r.projected = to_vector(w);
        r.coefficients = RealVector();
        dg.messages.push_back("data is feasible; projection is the identity");
        r.initial_certificate = certify(s, r.projected, {});
        r.certificate = r.initial_certificate;
    } else {
        AugmentedProjection ap = augmented_projection(s, opts.max_augment, opts, co, &dg);
        r.basis = std::move(ap.basis);
        Projection pr = std::move(ap.projection);
        CapriniCertificate cert = std::move(ap.certificate);
        r.initial_certificate = std::move(ap.initial);
        co.gamma_positive = cert.gamma_positive;
        r.projected = pr.p;
        r.coefficients = pr.x;

        // Alternative data: move w so that p is the exact minimizer.
        ComplexVector wt = to_vector(w);
        SampleSet cur = s;
        std::vector<double> support = cert.support;
        // At least one round even when the projection already certifies
        // within tolerance: the alternative data makes it exactly optimal.
        for (int fix = 0; fix <= opts.max_datafix; ++fix) {
            wt += alternative_data(cur, as_span(pr.p), cert);
            cur = s.with_values(as_span(wt));
            ++dg.datafix_rounds;
            cert = certify(cur, pr.p, support);
            if (cert.certified)
                break;
            bool grew = false;
            for (const auto& m : cert.scan.minima)
                if (m.location > 0.0 && m.value < -kNegligibleMin * scale) {
                    const std::size_t sz = support.size();
                    add_unique(support, m.location);
                    grew = grew || support.size() != sz;
                }
            if (!grew && fix > 0)
                break;
            std::sort(support.begin(), support.end());
            cert = certify(cur, pr.p, support);
        }
        r.certificate = cert;
        if (!cert.certified) {
            std::ostringstream msg;
            msg << "certificate failed: min C = " << cert.min_value << " (scale " << cert.scale << ")";
            dg.messages.push_back(msg.str());
        }
        r.alternative_data = wt;
    }
    if (r.alternative_data.size() == 0)
        r.alternative_data = to_vector(w);
    r.dw = r.alternative_data - to_vector(w);

    const SampleSet sp = s.with_values(as_span(r.projected));
    const InterpolationOutcome io = interpolate_with_reprojection(sp, opts, &dg);
    r.interpolant = io.chain;

    std::vector<cplx> fstar(n);
    for (std::size_t j = 0; j < n; ++j) {
        fstar[j] = eval_chain(r.interpolant, s[j].node);
        const double ref = std::abs(r.projected(static_cast<Eigen::Index>(j)));
        const double dev = std::abs(fstar[j] - r.projected(static_cast<Eigen::Index>(j)));
        dg.node_residual = std::max(dg.node_residual, ref > 0.0 ? dev / ref : dev);
    }
    r.rho = estimate_rho(s, fstar);

    if (opts.extract_spectrum) {
        try {
            r.rational = extract(r.interpolant);
            dg.spectrum_ok = true;
        } catch (const SpectralError& e) {
            dg.messages.push_back(std::string("spectral extraction failed: ") + e.what());
        }
    }
    return r;
}

}  // namespace stieltjes
