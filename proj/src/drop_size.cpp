#include "rainforge/drop_size.hpp"

#include "rainforge/errors.hpp"
#include "rainforge/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rainforge {

DropSizeDistribution::DropSizeDistribution(double a_coeff, double beta, DiameterRange range)
    : a_{a_coeff}, beta_{beta}, range_{range} {
    if (!std::isfinite(a_coeff) || a_coeff <= 0.0)
        throw validation_error("size distribution prefactor must be finite and positive");
    if (!std::isfinite(beta) || beta <= 0.0)
        throw validation_error("size distribution slope must be finite and positive");
}

DropSizeDistribution marshall_palmer(const RainIntensity& i, const DiameterRange& range) {
    return {8.0e6, 4100.0 * std::pow(i.mm_per_h(), -0.21), range};
}

double number_density(const DropSizeDistribution& dsd, double d) {
    if (!(d >= 0.0)) throw domain_error("number_density: diameter must be >= 0");
    return dsd.a_coeff() * std::exp(-dsd.beta() * d);
}

namespace {

// exp(-beta d_min) - exp(-beta d_max), computed without cancellation.
double tail_difference(const DropSizeDistribution& dsd) {
    const double b = dsd.beta();
    const double lo = dsd.range().d_min();
    const double hi = dsd.range().d_max();
    return -std::exp(-b * lo) * std::expm1(-b * (hi - lo));
}

}  // namespace

double total_concentration(const DropSizeDistribution& dsd) {
    return dsd.a_coeff() / dsd.beta() * tail_difference(dsd);
}

double cdf(const DropSizeDistribution& dsd, double d) {
    const auto& r = dsd.range();
    if (!(d >= r.d_min() && d <= r.d_max()))
        throw domain_error("cdf: diameter " + std::to_string(d) + " outside distribution range");
    const double b = dsd.beta();
    const double num = -std::exp(-b * r.d_min()) * std::expm1(-b * (d - r.d_min()));
    return num / tail_difference(dsd);
}

double inverse_cdf(const DropSizeDistribution& dsd, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw domain_error("inverse_cdf: u must lie in [0, 1]");
    const auto& r = dsd.range();
    const double b = dsd.beta();
    // ln[e^{-b dmin} - u (e^{-b dmin} - e^{-b dmax})] / -b, rewritten relative
    // to d_min so small u keeps full precision.
    const double frac = -std::expm1(-b * (r.d_max() - r.d_min()));
    const double d = r.d_min() - std::log1p(-u * frac) / b;
    return std::clamp(d, r.d_min(), r.d_max());
}

double mean_diameter(const DropSizeDistribution& dsd) {
    // E[D] for a truncated exponential:
    // d_min + 1/b - w e^{-b w} / (1 - e^{-b w}), w = d_max - d_min.
    const double b = dsd.beta();
    const double w = dsd.range().d_max() - dsd.range().d_min();
    return dsd.range().d_min() + 1.0 / b + w * std::exp(-b * w) / std::expm1(-b * w);
}

double sample_diameter(const DropSizeDistribution& dsd, std::uint64_t seed, std::uint64_t index) {
    CounterRng rng{seed, index};
    return inverse_cdf(dsd, rng.uniform());
}

std::vector<double> sample_diameters(const DropSizeDistribution& dsd, std::uint64_t seed,
                                     std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_diameter(dsd, seed, i);
    return out;
}

}  // namespace rainforge
