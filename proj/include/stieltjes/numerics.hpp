#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "stieltjes/core.hpp"

namespace stieltjes {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Raised when the active-set iteration cap is hit. Carries the best feasible
// iterate found so far.
class NnlsError : public Error {
public:
    NnlsError(const std::string& what, RealVector best, double kkt)
        : Error(what), best_(std::move(best)), kkt_(kkt) {}
    const RealVector& best_iterate() const noexcept { return best_; }
    double kkt_violation() const noexcept { return kkt_; }

private:
    RealVector best_;
    double kkt_;
};

class BracketError : public Error {
public:
    BracketError(const std::string& what, double a, double b, double fa, double fb)
        : Error(what), a_(a), b_(b), fa_(fa), fb_(fb) {}
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double fa() const noexcept { return fa_; }
    double fb() const noexcept { return fb_; }

private:
    double a_, b_, fa_, fb_;
};

// Lawson-Hanson active set solver for min |Ax - b| subject to x >= 0.
// Columns are equilibrated internally; the returned x is in the original scaling.
RealVector nnls(const RealMatrix& A, const RealVector& b);

// Largest violation of the NNLS optimality conditions, with g = A^T(Ax - b):
// |g_i| where x_i > 0 and max(0, -g_i) where x_i == 0.
double nnls_kkt_violation(const RealMatrix& A, const RealVector& b, const RealVector& x);

// Minimum-norm least-squares solution (pseudo-inverse); singular values below
// rcond * sigma_max are dropped.
RealVector min_norm_lsq(const RealMatrix& A, const RealVector& b, double rcond = 1e-12);

// Brent's method on a sign-changing bracket [a, b]. Terminates when the
// bracket is narrower than tol * (1 + |x|).
double brent_root(const std::function<double(double)>& f, double a, double b, double tol = 1e-14);

struct LocalMinimum {
    double location;
    double value;
};

struct ScanResult {
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<LocalMinimum> minima;
};

struct ScanOptions {
    int gridsize = 2000;
    // Grid is uniform on [lo, linear_until] and logarithmic on [linear_until, hi].
    double linear_until = 1.0;
    double refine_rtol = 1e-12;
};

// Sampling grid used by scan_local_minima.
std::vector<double> scan_grid(double lo, double hi, const ScanOptions& opts = {});

// Locates the local minima of f on [lo, hi] from the sampled sign pattern
// v[i-1] > v[i] < v[i+1], refining each by golden-section search. The left
// endpoint is reported when it is a one-sided minimum.
ScanResult scan_local_minima(const std::function<double(double)>& f, double lo, double hi,
                             const ScanOptions& opts = {});

// Golden-section minimization of a unimodal f on [a, b].
LocalMinimum golden_section(const std::function<double(double)>& f, double a, double b,
                            double rtol = 1e-12);

}  // namespace stieltjes
