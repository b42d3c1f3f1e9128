#pragma once

// Exponential raindrop size distribution N(D) = A exp(-beta D), truncated to a
// diameter range. D in meters, N in m^-4, beta in m^-1.

#include "rainforge/units.hpp"

#include <cstdint>
#include <vector>

namespace rainforge {

class DropSizeDistribution {
  public:
    // Throws validation_error unless a_coeff > 0 and beta > 0.
    DropSizeDistribution(double a_coeff, double beta, DiameterRange range);

    double a_coeff() const { return a_; }
    double beta() const { return beta_; }
    const DiameterRange& range() const { return range_; }

  private:
    double a_;
    double beta_;
    DiameterRange range_;
};

// Marshall-Palmer: A = 8e6 m^-4, beta = 4100 * I^-0.21 m^-1 with I in mm/h.
DropSizeDistribution marshall_palmer(const RainIntensity& i, const DiameterRange& range);

// A * exp(-beta d). Throws domain_error for d < 0.
double number_density(const DropSizeDistribution& dsd, double d);

// Drops per cubic meter with diameter inside the range.
double total_concentration(const DropSizeDistribution& dsd);

// Truncated CDF on [d_min, d_max]. Throws domain_error outside the range.
double cdf(const DropSizeDistribution& dsd, double d);

// Inverse of cdf; u in [0, 1], result clamped to [d_min, d_max].
double inverse_cdf(const DropSizeDistribution& dsd, double u);

// Mean diameter of the truncated distribution.
double mean_diameter(const DropSizeDistribution& dsd);

// Diameter of drop `index` under `seed`: inverse_cdf of the first uniform of
// that drop's stream. sample_diameters and spawn_drops both go through this.
double sample_diameter(const DropSizeDistribution& dsd, std::uint64_t seed, std::uint64_t index);

std::vector<double> sample_diameters(const DropSizeDistribution& dsd, std::uint64_t seed,
                                     std::size_t n);

}  // namespace rainforge
