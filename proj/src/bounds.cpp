#include "stieltjes/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace stieltjes {

namespace {

constexpr cplx I{0.0, 1.0};

// Cofactor quadratic forms of a Hermitian matrix M through its eigen-decomposition
// M = U diag(lambda) U^*. With cof M = det(M) M^{-T} = conj(U) diag(mu) U^T and
// mu_i = prod_{j != i} lambda_j, everything is divided by c = prod_{j > 0} lambda_j
// (lambda ascending), which keeps the ratios finite even when det M ~ 0.
DiskDetail disk_from_matrix(const ComplexMatrix& M, const ComplexVector& xi,
                            const ComplexVector& eta, cplx z, cplx center_factor,
                            const char* which)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(M);
    if (es.info() != Eigen::Success)
        throw Error("Hermitian eigenvalue solver did not converge");
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const ComplexMatrix& U = es.eigenvectors();
    const Eigen::Index n = lambda.size();
    const double lmax = std::max(std::abs(lambda(n - 1)), std::abs(lambda(0)));
    const double lmin = lambda(0);

    if (lmin < -1e-10 * std::max(1.0, lmax)) {
        std::ostringstream msg;
        msg << "the " << which << " Pick matrix is indefinite (lambda_min = " << lmin
            << "); the data is infeasible";
        throw ConditioningError(msg.str());
    }
    if (n > 1 && !(lambda(1) > 64.0 * std::numeric_limits<double>::epsilon() * lmax)) {
        std::ostringstream msg;
        msg << "the " << which << " Pick matrix has more than one numerically zero eigenvalue "
            << "(lambda_1 = " << lambda(1) << ", lambda_max = " << lmax
            << "); reduce the number of nodes or treat the data as a boundary point";
        throw ConditioningError(msg.str());
    }

    Eigen::VectorXd mu(n);
    mu(0) = 1.0;
    for (Eigen::Index i = 1; i < n; ++i)
        mu(i) = lmin / lambda(i);

    const ComplexVector u = U.transpose() * xi;
    const ComplexVector v = U.transpose() * eta;
    DiskDetail d;
    d.det = lmin;
    for (Eigen::Index i = 0; i < n; ++i) {
        d.alpha += mu(i) * std::norm(u(i));
        d.a += mu(i) * u(i) * std::conj(v(i));
        d.beta += mu(i) * std::norm(v(i));
    }
    if (!(d.alpha > 0.0)) {
        std::ostringstream msg;
        msg << "degenerate " << which << " disk at z = " << z;
        throw ConditioningError(msg.str());
    }
    const double det = std::max(0.0, d.det);
    const cplx center = std::conj(d.a) / d.alpha + I * center_factor * det / (2.0 * d.alpha * z.imag());
    double r2 = std::norm(center) - d.beta / d.alpha;
    d.disk.center = center;
    if (r2 < 0.0) {
        if (r2 < -1e-12 * std::norm(center)) {
            std::ostringstream msg;
            msg << "negative squared radius " << r2 << " for the " << which << " disk at z = " << z;
            throw ConditioningError(msg.str());
        }
        r2 = 0.0;
        d.disk.pinned = true;
    }
    d.disk.radius = std::sqrt(r2);
    return d;
}

void check_query(cplx z)
{
    if (!(z.imag() > 0.0))
        throw DomainError("query point must lie in the open upper half-plane");
}

const ComplexSample* node_hit(const SampleSet& s, cplx z)
{
    for (const auto& smp : s)
        if (smp.node == z)
            return &smp;
    return nullptr;
}

}  // namespace

DiskDetail disk_N_detail(const SampleSet& s, cplx z)
{
    check_query(z);
    if (const auto* hit = node_hit(s, z)) {
        DiskDetail d;
        d.disk = {hit->value, 0.0, false};
        return d;
    }
    const auto n = static_cast<Eigen::Index>(s.size());
    ComplexVector xi(n), eta(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx den = z - std::conj(s[k].node);
        xi(k) = 1.0 / den;
        eta(k) = std::conj(s[k].value) / den;
    }
    DiskDetail d = disk_from_matrix(pick_matrices(s).N, xi, eta, z, 1.0, "N");
    d.radius_sq_bound = d.disk.center.imag() / z.imag() * std::max(0.0, d.det) / d.alpha;
    return d;
}

DiskDetail disk_P_detail(const SampleSet& s, cplx z)
{
    check_query(z);
    if (const auto* hit = node_hit(s, z)) {
        DiskDetail d;
        d.disk = {hit->value, 0.0, false};
        return d;
    }
    const auto n = static_cast<Eigen::Index>(s.size());
    ComplexVector xi(n), eta(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx den = z - std::conj(s[k].node);
        xi(k) = z / den;
        eta(k) = z * std::conj(s[k].value) / den - std::conj(s[k].value);
    }
    DiskDetail d = disk_from_matrix(pick_matrices(s).P, xi, eta, z, std::conj(z), "P");
    d.radius_sq_bound = (z * d.disk.center).imag() / z.imag() * std::max(0.0, d.det) / d.alpha;
    return d;
}

Disk disk_N(const SampleSet& s, cplx z)
{
    return disk_N_detail(s, z).disk;
}

Disk disk_P(const SampleSet& s, cplx z)
{
    return disk_P_detail(s, z).disk;
}

AdmissibleLens intersect_disks(const Disk& a, const Disk& b, int npoints)
{
    if (npoints < 4)
        throw DomainError("lens boundary needs at least 4 points");
    AdmissibleLens lens{a, b, {}, false};
    const double d = std::abs(b.center - a.center);
    const double slack = 1e-12 * std::max({std::abs(a.center), std::abs(b.center), a.radius, b.radius});

    auto circle = [&](const Disk& c) {
        for (int i = 0; i < npoints; ++i) {
            const double th = 2.0 * std::numbers::pi * i / npoints;
            lens.boundary.push_back(c.center + std::polar(c.radius, th));
        }
    };

    if (d > a.radius + b.radius + slack) {
        lens.empty = true;
        return lens;
    }
    if (d + a.radius <= b.radius + slack) {
        circle(a);
        return lens;
    }
    if (d + b.radius <= a.radius + slack) {
        circle(b);
        return lens;
    }

    auto half_angle = [d](double r1, double r2) {
        const double c = (d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1);
        return std::acos(std::clamp(c, -1.0, 1.0));
    };
    const double ha = half_angle(a.radius, b.radius);
    const double hb = half_angle(b.radius, a.radius);
    const double tha = std::arg(b.center - a.center);
    const double thb = std::arg(a.center - b.center);
    const int na = npoints / 2;
    const int nb = npoints - na;
    for (int i = 0; i < na; ++i) {
        const double th = tha - ha + 2.0 * ha * i / (na - 1);
        lens.boundary.push_back(a.center + std::polar(a.radius, th));
    }
    for (int i = 0; i < nb; ++i) {
        const double th = thb - hb + 2.0 * hb * i / (nb - 1);
        lens.boundary.push_back(b.center + std::polar(b.radius, th));
    }
    return lens;
}

AdmissibleLens admissible_lens(const SampleSet& s, cplx z, int npoints)
{
    return intersect_disks(disk_N(s, z), disk_P(s, z), npoints);
}

}  // namespace stieltjes
