#include "rainforge/streak.hpp"

#include "rainforge/composite.hpp"
#include "rainforge/errors.hpp"
#include "rainforge/parallel.hpp"
#include "rainforge/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace rainforge {

// ---------------------------------------------------------------------------
// Segment construction
// ---------------------------------------------------------------------------

StreakSegment streak_segment(const CameraModel& cam, const Raindrop& drop) {
    vec3 a = cam.to_camera(drop.position);
    vec3 b = cam.to_camera(drop.position_at(cam.exposure_s()));
    const double near = cam.near_m();
    if (a.z <= near && b.z <= near)
        throw internal_error("drop " + std::to_string(drop.id) + " never crosses the near plane");

    double t0 = 0.0, t1 = 1.0;
    if (a.z < near) t0 = (near - a.z) / (b.z - a.z);
    if (b.z < near) t1 = (near - a.z) / (b.z - a.z);
    const vec3 ca = a + (b - a) * t0;
    const vec3 cb = a + (b - a) * t1;
    // Guard against the clipped endpoint landing a rounding error behind the plane.
    const vec3 pa{ca.x, ca.y, std::max(ca.z, near)};
    const vec3 pb{cb.x, cb.y, std::max(cb.z, near)};

    StreakSegment seg;
    seg.drop_id = drop.id;
    seg.depth_m = 0.5 * (pa.z + pb.z);
    seg.width_px = cam.fx() * drop.diameter / seg.depth_m;
    seg.time_span = t1 - t0;
    seg.p0 = project_camera_space(cam, pa);
    seg.p1 = project_camera_space(cam, pb);

    // Liang-Barsky clip against the image grown by a margin that keeps the
    // whole drawn rectangle.
    const double margin = 0.5 * std::max(seg.width_px, 1.0) + 1.0;
    const double du = seg.p1.u - seg.p0.u, dv = seg.p1.v - seg.p0.v;
    double s0 = 0.0, s1 = 1.0;
    auto clip = [&](double p, double q) {
        if (p == 0.0) return q >= 0.0;
        const double r = q / p;
        if (p < 0.0) {
            if (r > s1) return false;
            s0 = std::max(s0, r);
        } else {
            if (r < s0) return false;
            s1 = std::min(s1, r);
        }
        return true;
    };
    const bool inside = clip(-du, seg.p0.u + margin) && clip(du, cam.width() + margin - seg.p0.u) &&
                        clip(-dv, seg.p0.v + margin) && clip(dv, cam.height() + margin - seg.p0.v);
    if (inside && (s0 > 0.0 || s1 < 1.0)) {
        const double iz0 = 1.0 / seg.p0.z_cam, iz1 = 1.0 / seg.p1.z_cam;
        auto at = [&](double s) {
            return ImagePoint{seg.p0.u + du * s, seg.p0.v + dv * s, 1.0 / (iz0 + (iz1 - iz0) * s)};
        };
        const ImagePoint q0 = at(s0), q1 = at(s1);
        seg.p0 = q0;
        seg.p1 = q1;
        seg.time_span *= s1 - s0;
    }
    return seg;
}

double per_pixel_tau1(const StreakSegment& segment, double exposure_s) {
    return exposure_s * segment.time_span / std::max(segment.length_px(), 1.0);
}

// ---------------------------------------------------------------------------
// Appearance
// ---------------------------------------------------------------------------

void StreakAppearance::validate() const {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw validation_error("streak opacity must lie in [0, 1]");
    if (!(gain >= 0.0 && std::isfinite(gain))) throw validation_error("streak gain must be finite and >= 0");
    if (mode == Mode::procedural) {
        const auto& p = procedural;
        if (!(p.sigma_factor > 0.0 && p.sigma_factor <= 1.0))
            throw validation_error("gaussian sigma factor must lie in (0, 1]");
        if (!(p.intensity >= 0.0 && std::isfinite(p.intensity)))
            throw validation_error("streak intensity must be finite and >= 0");
        if (!(p.opacity >= 0.0 && p.opacity <= 1.0))
            throw validation_error("procedural opacity must lie in [0, 1]");
        return;
    }
    if (!atlas || atlas->entries.empty()) throw config_error("streak atlas is empty");
    for (const auto& e : atlas->entries) {
        if (!(e.length_px > 0.0 && e.width_px > 0.0) || e.tex_width <= 0 || e.tex_height <= 0)
            throw validation_error("streak atlas entries need positive dimensions");
        const auto n = static_cast<std::size_t>(e.tex_width) * e.tex_height;
        if (e.gray.size() != n || e.alpha.size() != n)
            throw validation_error("streak atlas texture buffer does not match its size");
    }
}

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

namespace {

struct Point2 {
    double s, t;
};

// Convex polygon in streak-local (s, t) coordinates.
struct Polygon {
    std::array<Point2, 12> v;
    int n = 0;
};

// Sutherland-Hodgman against sign * coord(axis) <= limit.
void clip_polygon(Polygon& poly, bool along_t, double sign, double limit) {
    Polygon out;
    for (int i = 0; i < poly.n; ++i) {
        const Point2& cur = poly.v[i];
        const Point2& nxt = poly.v[(i + 1) % poly.n];
        const double dc = sign * (along_t ? cur.t : cur.s) - limit;
        const double dn = sign * (along_t ? nxt.t : nxt.s) - limit;
        if (dc <= 0.0) out.v[out.n++] = cur;
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            const double r = dc / (dc - dn);
            out.v[out.n++] = {cur.s + (nxt.s - cur.s) * r, cur.t + (nxt.t - cur.t) * r};
        }
    }
    poly = out;
}

double signed_area(const Polygon& p) {
    double a = 0;
    for (int i = 0; i < p.n; ++i) {
        const Point2& c = p.v[i];
        const Point2& n = p.v[(i + 1) % p.n];
        a += c.s * n.t - n.s * c.t;
    }
    return 0.5 * a;
}

// Gaussian profile g(t) = exp(-t^2 / (2 sigma^2)) with antiderivatives
// G = int_0^t g and K = int_0^t G.
struct GaussianProfile {
    double sigma;

    double G(double t) const {
        return sigma * std::sqrt(std::numbers::pi / 2.0) * std::erf(t / (sigma * std::numbers::sqrt2));
    }
    double K(double t, double g_of_t) const {
        return t * g_of_t + sigma * sigma * (std::exp(-t * t / (2.0 * sigma * sigma)) - 1.0);
    }
};

// Integral of g(t) over the polygon, via the divergence theorem applied to the
// field (0, G(t)): each edge contributes -ds times the mean of G along it.
double gaussian_integral(const Polygon& p, const GaussianProfile& prof) {
    std::array<double, 12> Gv{}, Kv{};
    for (int i = 0; i < p.n; ++i) {
        Gv[i] = prof.G(p.v[i].t);
        Kv[i] = prof.K(p.v[i].t, Gv[i]);
    }
    double sum = 0;
    for (int i = 0; i < p.n; ++i) {
        const int j = (i + 1) % p.n;
        const double ds = p.v[j].s - p.v[i].s;
        if (ds == 0.0) continue;
        const double dt = p.v[j].t - p.v[i].t;
        const double mean_g = std::fabs(dt) < 1e-7 * prof.sigma ? prof.G(0.5 * (p.v[i].t + p.v[j].t))
                                                                 : (Kv[j] - Kv[i]) / dt;
        sum -= ds * mean_g;
    }
    return sum;
}

// The drawn rectangle of one streak in image space.
struct StreakGeometry {
    double au, av;  // start point p0
    double du, dv;  // unit direction
    double len;     // p0 -> p1 length in pixels
    double half;    // drawn half-width (>= 0.5)

    static StreakGeometry of(const StreakSegment& seg) {
        StreakGeometry g;
        g.au = seg.p0.u;
        g.av = seg.p0.v;
        const double eu = seg.p1.u - seg.p0.u, ev = seg.p1.v - seg.p0.v;
        g.len = std::hypot(eu, ev);
        if (g.len > 1e-12) {
            g.du = eu / g.len;
            g.dv = ev / g.len;
        } else {
            g.len = 0.0;
            g.du = 0.0;
            g.dv = 1.0;
        }
        g.half = 0.5 * std::max(seg.width_px, 1.0);
        return g;
    }

    Point2 local(double x, double y) const {
        const double rx = x - au, ry = y - av;
        return {rx * du + ry * dv, -rx * dv + ry * du};
    }
    bool inside(const Point2& p) const {
        return p.s >= -half && p.s <= len + half && p.t >= -half && p.t <= half;
    }
    std::array<std::array<double, 2>, 4> corners() const {
        const double s_lo = -half, s_hi = len + half;
        auto img = [&](double s, double t) {
            return std::array<double, 2>{au + s * du - t * dv, av + s * dv + t * du};
        };
        return {img(s_lo, -half), img(s_hi, -half), img(s_hi, half), img(s_lo, half)};
    }

    // x-extent of the rectangle within the horizontal band [y0, y1].
    bool row_span(double y0, double y1, double& xmin, double& xmax) const {
        const auto c = corners();
        xmin = INFINITY;
        xmax = -INFINITY;
        for (int i = 0; i < 4; ++i) {
            const auto& p = c[i];
            const auto& q = c[(i + 1) % 4];
            if (p[1] >= y0 && p[1] <= y1) {
                xmin = std::min(xmin, p[0]);
                xmax = std::max(xmax, p[0]);
            }
            for (double yb : {y0, y1}) {
                if ((p[1] - yb) * (q[1] - yb) < 0.0) {
                    const double x = p[0] + (q[0] - p[0]) * (yb - p[1]) / (q[1] - p[1]);
                    xmin = std::min(xmin, x);
                    xmax = std::max(xmax, x);
                }
            }
        }
        return xmin <= xmax;
    }

    double ymin() const {
        double m = INFINITY;
        for (const auto& c : corners()) m = std::min(m, c[1]);
        return m;
    }
    double ymax() const {
        double m = -INFINITY;
        for (const auto& c : corners()) m = std::max(m, c[1]);
        return m;
    }

    // Pixel square clipped to the rectangle, in local coordinates. Returns
    // false when the intersection is empty. `full` reports a pixel entirely
    // inside the rectangle.
    bool pixel_polygon(int x, int y, Polygon& poly, bool& full) const {
        poly.n = 4;
        poly.v[0] = local(x, y);
        poly.v[1] = local(x + 1.0, y);
        poly.v[2] = local(x + 1.0, y + 1.0);
        poly.v[3] = local(x, y + 1.0);
        full = inside(poly.v[0]) && inside(poly.v[1]) && inside(poly.v[2]) && inside(poly.v[3]);
        if (full) return true;
        clip_polygon(poly, false, -1.0, half);       // s >= -half
        if (poly.n < 3) return false;
        clip_polygon(poly, false, 1.0, len + half);  // s <= len + half
        if (poly.n < 3) return false;
        clip_polygon(poly, true, -1.0, half);        // t >= -half
        if (poly.n < 3) return false;
        clip_polygon(poly, true, 1.0, half);         // t <= half
        return poly.n >= 3;
    }
};

template <typename Fn>
void for_each_pixel(const StreakGeometry& g, int width, int y_begin, int y_end, Fn&& fn) {
    const int ylo = std::max(y_begin, static_cast<int>(std::floor(g.ymin())));
    const int yhi = std::min(y_end - 1, static_cast<int>(std::ceil(g.ymax())) - 1);
    for (int y = ylo; y <= yhi; ++y) {
        double xmin, xmax;
        if (!g.row_span(y, y + 1.0, xmin, xmax)) continue;
        const int xlo = std::max(0, static_cast<int>(std::floor(xmin)));
        const int xhi = std::min(width - 1, static_cast<int>(std::ceil(xmax)) - 1);
        for (int x = xlo; x <= xhi; ++x) fn(x, y);
    }
}

double bilinear(const std::vector<float>& tex, int w, int h, double fu, double fv) {
    const double x = std::clamp(fu * w - 0.5, 0.0, w - 1.0);
    const double y = std::clamp(fv * h - 0.5, 0.0, h - 1.0);
    const int x0 = static_cast<int>(x), y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double ax = x - x0, ay = y - y0;
    auto at = [&](int xx, int yy) { return static_cast<double>(tex[static_cast<std::size_t>(yy) * w + xx]); };
    return (at(x0, y0) * (1 - ax) + at(x1, y0) * ax) * (1 - ay) + (at(x0, y1) * (1 - ax) + at(x1, y1) * ax) * ay;
}

std::size_t choose_atlas_entry(const StreakAtlas& atlas, const StreakSegment& seg, std::uint64_t seed) {
    // Entries whose aspect ratio is within 25% (in log space) of the best match
    // are equally likely.
    const double aspect = std::log((seg.length_px() + std::max(seg.width_px, 1.0)) / std::max(seg.width_px, 1.0));
    std::vector<double> dist(atlas.entries.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
        const auto& e = atlas.entries[i];
        dist[i] = std::fabs(std::log((e.length_px + e.width_px) / e.width_px) - aspect);
    }
    const double best = *std::min_element(dist.begin(), dist.end());
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < dist.size(); ++i)
        if (dist[i] <= best + 0.25) candidates.push_back(i);
    CounterRng rng{seed ^ mix64(atlas_choice_stream), seg.drop_id};
    return candidates[std::min(candidates.size() - 1,
                               static_cast<std::size_t>(rng.uniform() * static_cast<double>(candidates.size())))];
}

// Everything the inner loop needs for one streak.
struct PreparedStreak {
    StreakGeometry geom;
    double opacity;      // applied on top of coverage
    double color[3];     // straight (not premultiplied) color
    float tau1;
    bool gaussian;
    GaussianProfile profile{1.0};
    const AtlasEntry* texture = nullptr;
    double inv_z0, inv_z1;
};

PreparedStreak prepare(const StreakSegment& seg, const StreakAppearance& app, std::uint64_t seed,
                       double exposure_s) {
    PreparedStreak p;
    p.geom = StreakGeometry::of(seg);
    p.tau1 = static_cast<float>(per_pixel_tau1(seg, exposure_s));
    p.inv_z0 = 1.0 / seg.p0.z_cam;
    p.inv_z1 = 1.0 / seg.p1.z_cam;
    const double width_scale = std::min(seg.width_px, 1.0);
    p.gaussian = false;
    if (app.mode == StreakAppearance::Mode::procedural) {
        const auto& proc = app.procedural;
        double flat_mass = 1.0;
        if (proc.profile == CrossSection::gaussian) {
            if (seg.width_px >= gaussian_min_width_px) {
                p.gaussian = true;
                p.profile = GaussianProfile{proc.sigma_factor * p.geom.half};
            } else {
                // Mean of the profile across the streak, sigma relative to half-width 1.
                flat_mass = GaussianProfile{proc.sigma_factor}.G(1.0);
            }
        }
        p.opacity = app.opacity * proc.opacity * width_scale * flat_mass;
        // Radiance L scaled by t0 / T, so the blend's S * t1 / t0 term becomes
        // a * L * t1 / T: the drop's share of the exposure at that pixel.
        const double c = proc.intensity * app.gain * reference_tau0_s / exposure_s;
        p.color[0] = p.color[1] = p.color[2] = c;
    } else {
        p.texture = &app.atlas->entries[choose_atlas_entry(*app.atlas, seg, seed)];
        p.opacity = app.opacity * width_scale;
        p.color[0] = p.color[1] = p.color[2] = app.gain;  // times texture gray per pixel
    }
    return p;
}

void stamp(const PreparedStreak& p, RainLayer& layer, std::vector<float>& transmittance, int y_begin,
           int y_end, const RasterOptions& opt) {
    const StreakGeometry& g = p.geom;
    Polygon poly;
    for_each_pixel(g, layer.width, y_begin, y_end, [&](int x, int y) {
        bool full = false;
        if (!g.pixel_polygon(x, y, poly, full)) return;
        double cover;
        if (p.gaussian) {
            cover = gaussian_integral(poly, p.profile);
            if (signed_area(poly) < 0.0) cover = -cover;
        } else {
            cover = full ? 1.0 : std::fabs(signed_area(poly));
        }
        if (!(cover > 0.0)) return;

        const Point2 c = g.local(x + 0.5, y + 0.5);
        double a = p.opacity * std::min(cover, 1.0);
        double shade = 1.0;
        if (p.texture) {
            const auto& e = *p.texture;
            const double fu = (c.t + g.half) / (2.0 * g.half);
            const double fv = (c.s + g.half) / (g.len + 2.0 * g.half);
            a *= bilinear(e.alpha, e.tex_width, e.tex_height, fu, fv);
            shade = bilinear(e.gray, e.tex_width, e.tex_height, fu, fv);
        }
        if (!(a > 0.0)) return;

        const std::size_t i = layer.index(x, y);
        if (opt.depth) {
            const float scene = opt.depth->at(x, y);
            if (!DepthMap::is_sky(scene)) {
                const double s = g.len > 0.0 ? std::clamp(c.s / g.len, 0.0, 1.0) : 0.5;
                const double z = 1.0 / (p.inv_z0 + (p.inv_z1 - p.inv_z0) * s);
                if (!(z < double(scene) - opt.occlusion_epsilon_m)) return;
            }
        }

        const float a_f = static_cast<float>(std::min(a, 1.0));
        const float t_old = transmittance[i];
        const float t_new = t_old * (1.0f - a_f);
        if (!(t_new < t_old)) return;
        const float w = t_old * a_f;
        for (int ch = 0; ch < 3; ++ch)
            layer.color[3 * i + ch] += w * static_cast<float>(p.color[ch] * shade);
        transmittance[i] = t_new;
        if (layer.tau1[i] == 0.0f) layer.tau1[i] = p.tau1;
    });
}

}  // namespace

// ---------------------------------------------------------------------------
// Rasterization
// ---------------------------------------------------------------------------

RainLayer rasterize(RainLayer layer, std::span<const StreakSegment> segments,
                    const StreakAppearance& appearance, std::uint64_t rng_seed, double exposure_s,
                    const RasterOptions& options) {
    appearance.validate();
    if (options.depth && (options.depth->width() != layer.width || options.depth->height() != layer.height))
        throw dimension_error("depth map and rain layer sizes differ");
    if (segments.empty()) return layer;

    std::vector<std::size_t> order(segments.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& sa = segments[a];
        const auto& sb = segments[b];
        if (sa.depth_m != sb.depth_m) return sa.depth_m < sb.depth_m;
        return sa.drop_id < sb.drop_id;
    });

    const int band_rows = std::max(1, options.band_rows);
    const int bands = (layer.height + band_rows - 1) / band_rows;
    std::vector<PreparedStreak> prepared(segments.size());
    std::vector<std::vector<std::uint32_t>> band_lists(bands);
    for (std::size_t k = 0; k < order.size(); ++k) {
        prepared[k] = prepare(segments[order[k]], appearance, rng_seed, exposure_s);
        const auto& g = prepared[k].geom;
        const int b0 = std::max(0, static_cast<int>(std::floor(g.ymin())) / band_rows);
        const int b1 = std::min(bands - 1, static_cast<int>(std::ceil(g.ymax())) / band_rows);
        if (g.ymax() < 0.0 || g.ymin() > layer.height) continue;
        for (int b = b0; b <= b1; ++b) band_lists[b].push_back(static_cast<std::uint32_t>(k));
    }

    std::vector<float> transmittance(layer.pixel_count());
    for (std::size_t i = 0; i < transmittance.size(); ++i) transmittance[i] = 1.0f - layer.alpha[i];

    parallel_for(static_cast<std::size_t>(bands), options.threads, [&](std::size_t b) {
        const int y0 = static_cast<int>(b) * band_rows;
        const int y1 = std::min(layer.height, y0 + band_rows);
        for (std::uint32_t k : band_lists[b]) stamp(prepared[k], layer, transmittance, y0, y1, options);
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < layer.width; ++x) {
                const std::size_t i = layer.index(x, y);
                if (transmittance[i] != 1.0f - layer.alpha[i]) layer.alpha[i] = 1.0f - transmittance[i];
            }
    });
    return layer;
}

std::vector<PixelCoverage> streak_footprint(const StreakSegment& segment, int width, int height) {
    const StreakGeometry g = StreakGeometry::of(segment);
    std::vector<PixelCoverage> out;
    Polygon poly;
    for_each_pixel(g, width, 0, height, [&](int x, int y) {
        bool full = false;
        if (!g.pixel_polygon(x, y, poly, full)) return;
        const double area = full ? 1.0 : std::fabs(signed_area(poly));
        if (area > 0.0) out.push_back({x, y, area});
    });
    return out;
}

}  // namespace rainforge
