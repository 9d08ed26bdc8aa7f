#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stieltjes {

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid arguments or violated preconditions of a domain type.
class DomainError : public Error {
public:
    using Error::Error;
};

// Evaluation hit a pole of a rational function.
class PoleError : public DomainError {
public:
    PoleError(const std::string& what, double pole) : DomainError(what), pole_(pole) {}
    double pole() const noexcept { return pole_; }

private:
    double pole_;
};

struct ComplexSample {
    cplx node;   // strictly in the upper half-plane
    cplx value;
};

// Ordered measurement set (z_j, w_j). Nodes are distinct and lie in the open
// upper half-plane. A default-constructed set is empty; that is what remains
// after an interpolation step consumes the last sample.
class SampleSet {
public:
    SampleSet() = default;
    explicit SampleSet(std::vector<ComplexSample> samples);
    SampleSet(std::span<const cplx> nodes, std::span<const cplx> values);

    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const ComplexSample& operator[](std::size_t i) const { return samples_[i]; }
    const std::vector<ComplexSample>& samples() const noexcept { return samples_; }

    std::vector<cplx> nodes() const;
    std::vector<cplx> values() const;
    double max_abs_value() const;

    // Same nodes, new values.
    SampleSet with_values(std::span<const cplx> values) const;

    auto begin() const noexcept { return samples_.begin(); }
    auto end() const noexcept { return samples_.end(); }

private:
    std::vector<ComplexSample> samples_;
};

struct Pole {
    double t;
    double sigma;
};

// f(z) = gamma - sigma0/z + sum_j sigma_j/(t_j - z), gamma >= 0, sigma0 >= 0,
// sigma_j > 0 and 0 < t_1 < ... < t_N.
class RationalStieltjes {
public:
    RationalStieltjes() = default;
    RationalStieltjes(double gamma, double sigma0, std::vector<Pole> poles);

    static RationalStieltjes constant(double gamma) { return {gamma, 0.0, {}}; }

    double gamma() const noexcept { return gamma_; }
    double sigma0() const noexcept { return sigma0_; }
    const std::vector<Pole>& poles() const noexcept { return poles_; }
    std::size_t degree() const noexcept { return poles_.size() + (sigma0_ > 0.0 ? 1 : 0); }
    bool is_zero() const noexcept { return gamma_ == 0.0 && sigma0_ == 0.0 && poles_.empty(); }

    // Throws PoleError when z coincides with 0 (sigma0 > 0) or with a pole.
    cplx operator()(cplx z) const;
    double operator()(double x) const { return (*this)(cplx(x, 0.0)).real(); }
    // d/dx on the real axis, away from the poles.
    double derivative(double x) const;

private:
    double gamma_ = 0.0;
    double sigma0_ = 0.0;
    std::vector<Pole> poles_;
};

cplx eval_rational(const RationalStieltjes& f, cplx z);

// Nevanlinna-Pick matrices of the data.
struct PickPair {
    ComplexMatrix N;
    ComplexMatrix P;
};

PickPair pick_matrices(const SampleSet& s);

struct FeasibilityReport {
    double lambda_min_N = 0.0;
    double lambda_min_P = 0.0;
    double scale_N = 1.0;
    double scale_P = 1.0;
    double tolerance = 0.0;
    bool feasible = false;
};

// Both minimal eigenvalues must be >= -tol * max(1, largest |entry|) of their matrix.
FeasibilityReport feasibility(const SampleSet& s, double tol = 1e-10);

double min_hermitian_eigenvalue(const ComplexMatrix& m);

}  // namespace stieltjes
