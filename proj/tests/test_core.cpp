#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stieltjes/core.hpp"

using namespace stieltjes;

TEST_CASE("eval_rational: constant and single pole")
{
    CHECK(eval_rational(RationalStieltjes::constant(2.0), cplx(0, 1)) == cplx(2.0, 0.0));
    const RationalStieltjes f(0.0, 0.0, {{1.0, 1.0}});
    const cplx v = f(cplx(0, 1));
    CHECK(v.real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(v.imag() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("eval_rational: zeros interlace the poles")
{
    const RationalStieltjes f(1.0, 0.0, {{1.0, 1.0}, {3.0, 2.0}});
    auto fx = [&](double x) { return f(x); };
    // Between consecutive poles f increases from -inf to +inf.
    const double x1 = oracle::bisect(fx, 1.0 + 1e-9, 3.0 - 1e-9);
    const double x2 = oracle::bisect(fx, 3.0 + 1e-9, 1e6);
    CHECK(std::abs(f(x1)) < 1e-9);
    CHECK(std::abs(f(x2)) < 1e-9);
    CHECK(1.0 < x1);
    CHECK(x1 < 3.0);
    CHECK(3.0 < x2);
}

TEST_CASE("eval_rational: pole hit names the pole")
{
    const RationalStieltjes f(0.0, 1.0, {{2.0, 1.0}});
    CHECK_THROWS_AS(f(cplx(2.0, 0.0)), PoleError);
    try {
        f(cplx(2.0, 0.0));
    } catch (const PoleError& e) {
        CHECK(e.pole() == 2.0);
    }
    CHECK_THROWS_AS(f(cplx(0.0, 0.0)), PoleError);
}

TEST_CASE("RationalStieltjes rejects invalid parameters")
{
    CHECK_THROWS_AS(RationalStieltjes(-1.0, 0.0, {}), DomainError);
    CHECK_THROWS_AS(RationalStieltjes(0.0, -1.0, {}), DomainError);
    CHECK_THROWS_AS(RationalStieltjes(0.0, 0.0, {{1.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(RationalStieltjes(0.0, 0.0, {{2.0, 1.0}, {1.0, 1.0}}), DomainError);
    CHECK_THROWS_AS(RationalStieltjes(0.0, 0.0, {{0.0, 1.0}}), DomainError);
}

TEST_CASE("SampleSet validation")
{
    CHECK_THROWS_AS(SampleSet(std::vector<ComplexSample>{{cplx(1, 0), 1.0}}), DomainError);
    CHECK_THROWS_AS(SampleSet(std::vector<ComplexSample>{{cplx(1, -1), 1.0}}), DomainError);
    CHECK_THROWS_AS(SampleSet(std::vector<ComplexSample>{{cplx(0, 1), 1.0}, {cplx(0, 1), 2.0}}), DomainError);
    const SampleSet s(std::vector<ComplexSample>{{cplx(0, 1), 1.0}, {cplx(0, 2), 2.0}});
    CHECK(s.size() == 2);
    CHECK(s.max_abs_value() == 2.0);
}

TEST_CASE("pick_matrices: one-point examples")
{
    auto one = [](cplx w) { return pick_matrices(SampleSet(std::vector<ComplexSample>{{cplx(0, 1), w}})); };
    auto a = one(cplx(0, 1));
    CHECK(std::abs(a.N(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(a.P(0, 0)) < 1e-15);
    auto b = one(cplx(1, 1));
    CHECK(std::abs(b.N(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(b.P(0, 0) - 1.0) < 1e-15);
}

TEST_CASE("pick_matrices: entries, Hermitian symmetry and PSD for 1/(1-z)")
{
    const RationalStieltjes f(0.0, 0.0, {{1.0, 1.0}});
    const std::vector<cplx> z = {cplx(0, 1), cplx(0, 2), cplx(1, 1)};
    const SampleSet s = oracle::sample(f, z);
    const PickPair pp = pick_matrices(s);
    const auto N = oracle::pick_N(z, s.values());
    const auto P = oracle::pick_P(z, s.values());
    CHECK((pp.N - N).norm() < 1e-14 * N.norm());
    CHECK((pp.P - P).norm() < 1e-14 * P.norm());
    CHECK(pp.N == pp.N.adjoint());
    CHECK(pp.P == pp.P.adjoint());
    CHECK(oracle::min_eigenvalue(pp.N) >= -1e-12);
    CHECK(oracle::min_eigenvalue(pp.P) >= -1e-12);
}

TEST_CASE("feasibility: exact samples feasible, conjugated value infeasible")
{
    const RationalStieltjes f(1.0, 0.0, {{2.0, 3.0}});
    std::vector<cplx> z;
    for (int j = 0; j < 6; ++j)
        z.push_back(cplx(0, std::pow(10.0, -2.0 + 0.8 * j)));
    const SampleSet s = oracle::sample(f, z);
    const FeasibilityReport ok = feasibility(s);
    CHECK(ok.feasible);
    CHECK(ok.tolerance == 1e-10);

    auto w = s.values();
    w[0] = std::conj(w[0]);
    const FeasibilityReport bad = feasibility(s.with_values(w));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.lambda_min_N < 0.0);
    CHECK(bad.lambda_min_N == doctest::Approx(oracle::min_eigenvalue(oracle::pick_N(z, w))).epsilon(1e-8));
}

TEST_CASE("feasibility: square-root example is feasible at relative tolerance 1e-10")
{
    const SampleSet s = oracle::sqrt_example(20, 0.0, 1);
    const FeasibilityReport r = feasibility(s, 1e-10);
    CHECK(r.feasible);
    // The matrices are numerically singular.
    CHECK(std::abs(r.lambda_min_N) < 1e-10 * r.scale_N);
}

TEST_CASE("property: sampled rationals are feasible and conjugate symmetric")
{
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int degree = static_cast<int>(rng.uniform() * 9);
        const RationalStieltjes f = oracle::random_rational(rng, degree, rng.uniform() < 0.5, rng.uniform() < 0.3);
        const auto z = oracle::random_nodes(rng, 1 + static_cast<int>(rng.uniform() * 12));
        const SampleSet s = oracle::sample(f, z);
        CHECK(feasibility(s, 1e-10).feasible);
        for (cplx x : z) {
            const cplx a = f(std::conj(x)), b = std::conj(f(x));
            CHECK(std::abs(a - b) <= 4e-16 * std::abs(b));
            CHECK(oracle::rel(f(x), oracle::eval_sum(f.gamma(), f.sigma0(), f.poles(), x)) < 1e-13);
        }
    }
}

TEST_CASE("property: positive and increasing on the negative axis")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const RationalStieltjes f = oracle::random_rational(rng, 1 + static_cast<int>(rng.uniform() * 6),
                                                            rng.uniform() < 0.5, rng.uniform() < 0.3);
        double prev = -1.0;
        for (int i = 0; i < 400; ++i) {
            const double x = -std::pow(10.0, 4.0 - 8.0 * i / 399.0);
            const cplx v = f(cplx(x, 0.0));
            CHECK(v.imag() == 0.0);
            CHECK(v.real() > 0.0);
            CHECK(v.real() >= prev);
            prev = v.real();
        }
    }
}

TEST_CASE("property: real zeros interlace the poles when gamma > 0")
{
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const RationalStieltjes f = oracle::random_rational(rng, 1 + static_cast<int>(rng.uniform() * 6), true,
                                                            rng.uniform() < 0.5);
        std::vector<double> ends;
        if (f.sigma0() > 0.0)
            ends.push_back(0.0);
        for (const Pole& p : f.poles())
            ends.push_back(p.t);
        ends.push_back(std::numeric_limits<double>::infinity());
        auto fx = [&](double x) { return f(x); };
        std::size_t zeros = 0;
        for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
            const double a = ends[k] * (1 + 1e-10) + 1e-300, b = std::isinf(ends[k + 1]) ? 1e12 : ends[k + 1] * (1 - 1e-10);
            if (fx(a) > 0.0 || fx(b) < 0.0)
                continue;
            const double x = oracle::bisect(fx, a, b);
            CHECK(std::abs(fx(x)) < 1e-6 * (1.0 + f.gamma()));
            ++zeros;
        }
        CHECK(zeros == f.degree());
    }
}
