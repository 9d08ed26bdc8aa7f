#include "stieltjes/uncertainty.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "stieltjes/rng.hpp"

namespace stieltjes {

namespace {

// Linear interpolation between order statistics (sorted input).
double quantile(const std::vector<double>& sorted, double q)
{
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double estimate_rho(const SampleSet& s, std::span<const cplx> fstar_values)
{
    if (s.empty())
        throw DomainError("estimate_rho needs at least one sample");
    if (fstar_values.size() != s.size())
        throw DomainError("estimate_rho: value count does not match the data");
    double sum = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j)
        sum += std::norm(s[j].value - fstar_values[j]);
    return std::sqrt(sum / static_cast<double>(2 * s.size() - 1));
}

double UncertaintyBand::width(std::size_t i) const
{
    return std::hypot(re_hi[i] - re_lo[i], im_hi[i] - im_lo[i]);
}

double UncertaintyBand::envelope_width(std::size_t i) const
{
    return std::hypot(re_max[i] - re_min[i], im_max[i] - im_min[i]);
}

UncertaintyBand band(const SampleSet& s, const FitResult& result, std::span<const cplx> grid,
                     const BandOptions& opts)
{
    if (opts.realizations < 0)
        throw DomainError("band: negative number of realizations");
    const std::size_t n = s.size();
    const std::size_t m = grid.size();
    UncertaintyBand b;
    b.grid.assign(grid.begin(), grid.end());
    b.rho = result.rho;
    b.source_certified = result.certified();
    for (cplx z : grid)
        b.center.push_back(eval_chain(result.interpolant, z));

    std::vector<cplx> fstar(n);
    for (std::size_t j = 0; j < n; ++j)
        fstar[j] = eval_chain(result.interpolant, s[j].node);

    FitOptions fo;
    fo.max_augment = opts.max_augment;
    fo.max_datafix = opts.max_datafix;
    fo.extract_spectrum = false;

    const auto R = static_cast<std::size_t>(opts.realizations);
    std::vector<std::vector<cplx>> values(R);
    std::vector<char> ok(R, 0), certified(R, 0);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= R)
                return;
            if (b.rho == 0.0) {
                // Every realization is the fitted data itself.
                values[r] = b.center;
                certified[r] = 1;
                ok[r] = 1;
                continue;
            }
            Rng rng = substream(opts.seed, r);
            std::vector<cplx> w(n);
            for (std::size_t j = 0; j < n; ++j) {
                const double a = rng.normal();
                const double c = rng.normal();
                w[j] = fstar[j] + b.rho * cplx(a, c);
            }
            try {
                const FitResult fr = fit(s.with_values(w), fo);
                std::vector<cplx> v(m);
                for (std::size_t i = 0; i < m; ++i)
                    v[i] = eval_chain(fr.interpolant, grid[i]);
                values[r] = std::move(v);
                certified[r] = fr.certified() ? 1 : 0;
                ok[r] = 1;
            } catch (const Error&) {
                ok[r] = 0;
            }
        }
    };

    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(R, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }

    for (std::size_t r = 0; r < R; ++r) {
        if (!ok[r])
            ++b.failed;
        else if (!certified[r])
            ++b.uncertified;
    }
    b.realizations = static_cast<int>(R) - b.failed;

    std::vector<double> re, im;
    for (std::size_t i = 0; i < m; ++i) {
        re.clear();
        im.clear();
        for (std::size_t r = 0; r < R; ++r)
            if (ok[r]) {
                re.push_back(values[r][i].real());
                im.push_back(values[r][i].imag());
            }
        const cplx c = b.center[i];
        if (re.empty()) {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        std::sort(re.begin(), re.end());
        std::sort(im.begin(), im.end());
        b.re_lo.push_back(quantile(re, opts.lower_quantile));
        b.re_hi.push_back(quantile(re, opts.upper_quantile));
        b.im_lo.push_back(quantile(im, opts.lower_quantile));
        b.im_hi.push_back(quantile(im, opts.upper_quantile));
        b.re_min.push_back(std::min(re.front(), c.real()));
        b.re_max.push_back(std::max(re.back(), c.real()));
        b.im_min.push_back(std::min(im.front(), c.imag()));
        b.im_max.push_back(std::max(im.back(), c.imag()));
    }
    return b;
}

}  // namespace stieltjes
