#include "stieltjes/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stieltjes {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Unconstrained least squares restricted to the passive columns.
RealVector solve_passive(const RealMatrix& A, const RealVector& b, const std::vector<bool>& passive)
{
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        if (passive[j])
            cols.push_back(j);
    RealVector z = RealVector::Zero(A.cols());
    if (cols.empty())
        return z;
    RealMatrix Ap(A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        Ap.col(static_cast<Eigen::Index>(c)) = A.col(cols[c]);
    const RealVector zp = Ap.colPivHouseholderQr().solve(b);
    for (std::size_t c = 0; c < cols.size(); ++c)
        z(cols[c]) = zp(static_cast<Eigen::Index>(c));
    return z;
}

}  // namespace

double nnls_kkt_violation(const RealMatrix& A, const RealVector& b, const RealVector& x)
{
    const RealVector g = A.transpose() * (A * x - b);
    double v = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        v = std::max(v, x(i) > 0.0 ? std::abs(g(i)) : std::max(0.0, -g(i)));
    return v;
}

RealVector nnls(const RealMatrix& A_in, const RealVector& b)
{
    const Eigen::Index m = A_in.rows();
    const Eigen::Index k = A_in.cols();
    if (m < 1 || k < 1)
        throw DomainError("nnls needs a non-empty matrix");
    if (b.size() != m)
        throw DomainError("nnls: right-hand side length does not match the matrix");
    if (!A_in.allFinite() || !b.allFinite())
        throw DomainError("nnls: non-finite input");

    // Equilibrate columns; zero columns stay inactive.
    RealVector colscale(k);
    RealMatrix A = A_in;
    for (Eigen::Index j = 0; j < k; ++j) {
        const double nrm = A.col(j).norm();
        colscale(j) = nrm > 0.0 ? nrm : 0.0;
        if (nrm > 0.0)
            A.col(j) /= nrm;
    }

    RealVector x = RealVector::Zero(k);
    std::vector<bool> passive(static_cast<std::size_t>(k), false);
    std::vector<bool> locked(static_cast<std::size_t>(k), false);  // round-off rejects
    for (Eigen::Index j = 0; j < k; ++j)
        if (colscale(j) == 0.0)
            locked[j] = true;

    const double tol = 10.0 * kEps * std::max<double>(m, k) * std::max(1.0, b.norm());
    const int max_outer = static_cast<int>(3 * k);

    RealVector w = A.transpose() * (b - A * x);
    int outer = 0;
    for (;;) {
        Eigen::Index t = -1;
        double wmax = tol;
        for (Eigen::Index j = 0; j < k; ++j)
            if (!passive[j] && !locked[j] && w(j) > wmax) {
                wmax = w(j);
                t = j;
            }
        if (t < 0)
            break;
        if (++outer > max_outer) {
            RealVector best = x;
            for (Eigen::Index j = 0; j < k; ++j)
                best(j) = colscale(j) > 0.0 ? x(j) / colscale(j) : 0.0;
            std::ostringstream msg;
            msg << "nnls: iteration cap of " << max_outer << " outer iterations exceeded";
            throw NnlsError(msg.str(), best, nnls_kkt_violation(A_in, b, best));
        }
        passive[t] = true;

        RealVector z = solve_passive(A, b, passive);
        if (!(z(t) > 0.0)) {
            // The entering column cannot improve the fit in floating point.
            passive[t] = false;
            locked[t] = true;
            continue;
        }
        for (int inner = 0; inner <= k; ++inner) {
            bool all_pos = true;
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[j] && !(z(j) > 0.0)) {
                    all_pos = false;
                    break;
                }
            if (all_pos)
                break;
            double alpha = 1.0;
            Eigen::Index jmin = -1;
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[j] && !(z(j) > 0.0)) {
                    const double a = x(j) / (x(j) - z(j));
                    if (jmin < 0 || a < alpha) {
                        alpha = a;
                        jmin = j;
                    }
                }
            x += alpha * (z - x);
            x(jmin) = 0.0;
            passive[jmin] = false;
            for (Eigen::Index j = 0; j < k; ++j)
                if (passive[j] && x(j) <= 0.0) {
                    passive[j] = false;
                    x(j) = 0.0;
                }
            z = solve_passive(A, b, passive);
        }
        x = z;
        for (Eigen::Index j = 0; j < k; ++j)
            if (!passive[j] || x(j) < 0.0)
                x(j) = 0.0;
        std::fill(locked.begin(), locked.end(), false);
        for (Eigen::Index j = 0; j < k; ++j)
            if (colscale(j) == 0.0)
                locked[j] = true;
        w = A.transpose() * (b - A * x);
    }

    RealVector out(k);
    for (Eigen::Index j = 0; j < k; ++j)
        out(j) = colscale(j) > 0.0 ? std::max(0.0, x(j)) / colscale(j) : 0.0;
    return out;
}

RealVector min_norm_lsq(const RealMatrix& A, const RealVector& b, double rcond)
{
    if (b.size() != A.rows())
        throw DomainError("min_norm_lsq: right-hand side length does not match the matrix");
    if (A.rows() == 0 || A.cols() == 0)
        return RealVector::Zero(A.cols());
    if (A.isZero(0.0))
        return RealVector::Zero(A.cols());
    Eigen::JacobiSVD<RealMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rcond);
    return svd.solve(b);
}

double brent_root(const std::function<double(double)>& f, double a, double b, double tol)
{
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        std::ostringstream msg;
        msg << "brent_root: no sign change on [" << a << ", " << b << "], f(a) = " << fa
            << ", f(b) = " << fb;
        throw BracketError(msg.str(), a, b, fa, fb);
    }
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 500; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol * (1.0 + std::abs(b));
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            p = std::abs(p);
            const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
            const double min2 = std::abs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

std::vector<double> scan_grid(double lo, double hi, const ScanOptions& opts)
{
    if (!(lo < hi))
        throw DomainError("scan: need lo < hi");
    if (opts.gridsize < 3)
        throw DomainError("scan: gridsize must be at least 3");
    const int n = opts.gridsize;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    const double split = opts.linear_until;
    auto linear = [&](double a, double b, int count, bool include_last) {
        const double denom = include_last ? count - 1 : count;
        for (int i = 0; i < count; ++i)
            grid.push_back(a + (b - a) * (static_cast<double>(i) / denom));
    };
    auto logarithmic = [&](double a, double b, int count) {
        const double la = std::log(a), lb = std::log(b);
        for (int i = 0; i < count; ++i)
            grid.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / (count - 1)));
    };
    if (!(split > 0.0) || hi <= split) {
        linear(lo, hi, n, true);
    } else if (lo >= split) {
        logarithmic(lo, hi, n);
    } else {
        const int nlin = std::max(2, n / 5);
        const int nlog = std::max(2, n - nlin);
        linear(lo, split, nlin, false);
        logarithmic(split, hi, nlog);
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

LocalMinimum golden_section(const std::function<double(double)>& f, double a, double b, double rtol)
{
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(b - a) <= rtol * 0.5 * (std::abs(a) + std::abs(b)) + 1e-300)
            break;
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? LocalMinimum{c, fc} : LocalMinimum{d, fd};
}

ScanResult scan_local_minima(const std::function<double(double)>& f, double lo, double hi,
                             const ScanOptions& opts)
{
    ScanResult r;
    r.grid = scan_grid(lo, hi, opts);
    r.values.reserve(r.grid.size());
    for (double x : r.grid)
        r.values.push_back(f(x));
    const auto& g = r.grid;
    const auto& v = r.values;
    const std::size_t n = g.size();

    if (v[0] < v[1]) {
        const LocalMinimum m = golden_section(f, g[0], g[1], opts.refine_rtol);
        r.minima.push_back(m.value < v[0] ? m : LocalMinimum{g[0], v[0]});
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (v[i - 1] > v[i] && v[i] <= v[i + 1]) {
            LocalMinimum m = golden_section(f, g[i - 1], g[i + 1], opts.refine_rtol);
            if (m.value > v[i])
                m = {g[i], v[i]};
            r.minima.push_back(m);
        }
    }
    return r;
}

}  // namespace stieltjes
