#include "rainforge/units.hpp"

#include "rainforge/errors.hpp"

#include <string>

namespace rainforge {

RainIntensity::RainIntensity(double mm_per_h, double cap_mm_per_h) : value_{mm_per_h} {
    if (!std::isfinite(mm_per_h) || mm_per_h <= 0.0)
        throw validation_error("rain intensity must be finite and positive, got " +
                               std::to_string(mm_per_h) + " mm/h");
    if (mm_per_h > cap_mm_per_h)
        throw validation_error("rain intensity " + std::to_string(mm_per_h) +
                               " mm/h exceeds cap of " + std::to_string(cap_mm_per_h) + " mm/h");
}

double intensity_to_si(const RainIntensity& i) { return i.mm_per_h() * 1e-3 / 3600.0; }

WindVector::WindVector(double vx, double vz, double cap_m_per_s) : vx_{vx}, vz_{vz} {
    if (!std::isfinite(vx) || !std::isfinite(vz))
        throw validation_error("wind components must be finite");
    if (magnitude() > cap_m_per_s)
        throw validation_error("wind magnitude " + std::to_string(magnitude()) +
                               " m/s exceeds cap of " + std::to_string(cap_m_per_s) + " m/s");
}

DiameterRange::DiameterRange(double d_min_m, double d_max_m) : d_min_{d_min_m}, d_max_{d_max_m} {
    if (!std::isfinite(d_min_m) || !std::isfinite(d_max_m))
        throw validation_error("diameter range bounds must be finite");
    if (!(d_min_m > 0.0 && d_min_m < d_max_m && d_max_m <= max_drop_diameter_m))
        throw validation_error("diameter range must satisfy 0 < d_min < d_max <= 10 mm, got [" +
                               std::to_string(d_min_m) + ", " + std::to_string(d_max_m) + "] m");
}

}  // namespace rainforge
