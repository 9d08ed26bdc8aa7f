#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stieltjes/core.hpp"
#include "stieltjes/fit.hpp"

namespace stieltjes {

// rho^2 = sum_j |w_j - f*(z_j)|^2 / (2n - 1).
double estimate_rho(const SampleSet& s, std::span<const cplx> fstar_values);

struct BandOptions {
    int realizations = 500;
    std::uint64_t seed = 1;
    // Refit budget per realization.
    int max_augment = 1;
    int max_datafix = 1;
    // 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
    double lower_quantile = 0.025;
    double upper_quantile = 0.975;
};

struct UncertaintyBand {
    std::vector<cplx> grid;
    std::vector<cplx> center;  // f* on the grid
    int realizations = 0;
    double rho = 0.0;
    bool source_certified = false;
    int uncertified = 0;  // refits whose certificate failed (still included)
    int failed = 0;       // refits that threw (excluded)
    std::vector<double> re_lo, re_hi, im_lo, im_hi;
    std::vector<double> re_min, re_max, im_min, im_max;

    // Diagonal of the quantile box at grid point i.
    double width(std::size_t i) const;
    double envelope_width(std::size_t i) const;
};

// Refits f*(z_j) + eps_j, Re eps and Im eps independent N(0, rho^2), and
// collects the refitted interpolants on the grid. Realization r draws from
// substream(seed, r), so the result does not depend on scheduling. The
// envelope also contains f* itself.
UncertaintyBand band(const SampleSet& s, const FitResult& result, std::span<const cplx> grid,
                     const BandOptions& opts = {});

}  // namespace stieltjes
