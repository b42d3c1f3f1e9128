#pragma once

// Physical quantities for weather and camera parameters. All types validate
// on construction and are immutable afterwards.

#include <cmath>

namespace rainforge {

inline constexpr double max_intensity_mm_per_h = 500.0;
inline constexpr double max_wind_m_per_s = 60.0;
inline constexpr double max_drop_diameter_m = 0.01;

// Rain intensity: volume of water per unit ground area per unit time.
class RainIntensity {
  public:
    // Throws validation_error unless 0 < value <= cap.
    explicit RainIntensity(double mm_per_h, double cap_mm_per_h = max_intensity_mm_per_h);

    double mm_per_h() const { return value_; }

  private:
    double value_;
};

// mm/h -> m/s: x * 1e-3 / 3600.
double intensity_to_si(const RainIntensity& i);

// Horizontal wind in the world frame (+y up, gravity along -y).
class WindVector {
  public:
    WindVector() = default;
    WindVector(double vx, double vz, double cap_m_per_s = max_wind_m_per_s);

    double vx() const { return vx_; }
    double vz() const { return vz_; }
    double magnitude() const { return std::hypot(vx_, vz_); }

  private:
    double vx_ = 0, vz_ = 0;
};

// Closed interval of drop diameters in meters, 0 < d_min < d_max <= 10 mm.
class DiameterRange {
  public:
    DiameterRange(double d_min_m, double d_max_m);

    static DiameterRange from_mm(double d_min_mm, double d_max_mm) {
        return {d_min_mm * 1e-3, d_max_mm * 1e-3};
    }
    // 0.5 mm .. 5 mm.
    static DiameterRange default_range() { return from_mm(0.5, 5.0); }

    double d_min() const { return d_min_; }
    double d_max() const { return d_max_; }
    bool contains(double d) const { return d >= d_min_ && d <= d_max_; }

  private:
    double d_min_, d_max_;
};

}  // namespace rainforge
