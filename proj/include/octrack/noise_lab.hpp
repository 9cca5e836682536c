#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "octrack/geometry.hpp"
#include "octrack/random.hpp"
#include "octrack/tracker.hpp"

namespace octrack {

// ---------------------------------------------------------------------------
// Synthetic scenes
// ---------------------------------------------------------------------------

/// Half-open frame interval [begin, end) during which a target emits no
/// detections.
struct OcclusionWindow {
    int begin = 0;
    int end = 0;
};

struct Waypoint {
    int frame = 0;
    double u = 0.0;
    double v = 0.0;
};

/// Sinusoidal lateral offset layered on the piecewise-linear carrier.
struct SinusoidSpec {
    double amplitude = 0.0;
    double period = 1.0;
    int axis = 1;  // 0 offsets u, 1 offsets v
};

struct TargetPlan {
    double box_w = 0.0;
    double box_h = 0.0;
    std::vector<Waypoint> waypoints;  // strictly increasing frames
    std::optional<SinusoidSpec> sinusoid;
    std::vector<OcclusionWindow> occlusions;
};

/// Ground-truth trajectories plus detection-noise parameters for one scene.
/// Frames run 1..frames inclusive. Generation is deterministic per seed:
/// each target consumes its own generator stream, and draws are consumed in
/// a fixed per-frame order (drop decision, then center noise).
struct ScenePlan {
    int frames = 0;
    std::uint64_t seed = 0;
    double sigma_u = 0.0;
    double sigma_v = 0.0;
    double false_negative_rate = 0.0;
    std::vector<TargetPlan> targets;

    void validate() const {
        if (frames < 1) {
            throw std::invalid_argument("ScenePlan: frames must be positive");
        }
        if (sigma_u < 0.0 || sigma_v < 0.0) {
            throw std::invalid_argument("ScenePlan: sigma must be non-negative");
        }
        if (false_negative_rate < 0.0 || false_negative_rate >= 1.0) {
            throw std::invalid_argument("ScenePlan: false_negative_rate must be in [0,1)");
        }
        for (const TargetPlan& t : targets) {
            if (t.box_w <= 0.0 || t.box_h <= 0.0 || t.waypoints.empty()) {
                throw std::invalid_argument("ScenePlan: target needs a box and waypoints");
            }
            for (std::size_t i = 1; i < t.waypoints.size(); ++i) {
                if (t.waypoints[i].frame <= t.waypoints[i - 1].frame) {
                    throw std::invalid_argument("ScenePlan: waypoint frames must increase");
                }
            }
            for (const OcclusionWindow& w : t.occlusions) {
                if (w.begin >= w.end || w.begin < 1 || w.end > frames + 1) {
                    throw std::invalid_argument("ScenePlan: occlusion window out of range");
                }
            }
        }
    }
};

struct GroundTruthEntry {
    int frame = 0;
    int target_id = 0;  // 1-based
    Box box;
};

struct Scene {
    std::vector<std::vector<Detection>> detections_per_frame;  // index 0 = frame 1
    std::vector<GroundTruthEntry> ground_truth;
};

namespace detail {

inline std::optional<std::pair<double, double>> target_center(const TargetPlan& t,
                                                              int frame) {
    const auto& wps = t.waypoints;
    if (frame < wps.front().frame || frame > wps.back().frame) {
        return std::nullopt;
    }
    double u = wps.back().u;
    double v = wps.back().v;
    for (std::size_t i = 1; i < wps.size(); ++i) {
        if (frame <= wps[i].frame) {
            const double a = static_cast<double>(frame - wps[i - 1].frame) /
                             static_cast<double>(wps[i].frame - wps[i - 1].frame);
            u = wps[i - 1].u + a * (wps[i].u - wps[i - 1].u);
            v = wps[i - 1].v + a * (wps[i].v - wps[i - 1].v);
            break;
        }
    }
    if (t.sinusoid.has_value()) {
        const SinusoidSpec& s = *t.sinusoid;
        const double offset = s.amplitude *
            std::sin(2.0 * std::numbers::pi *
                     static_cast<double>(frame - wps.front().frame) / s.period);
        (s.axis == 0 ? u : v) += offset;
    }
    return std::make_pair(u, v);
}

inline bool occluded(const TargetPlan& t, int frame) {
    for (const OcclusionWindow& w : t.occlusions) {
        if (frame >= w.begin && frame < w.end) {
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Detection confidence assigned to every synthetic detection.
inline constexpr double kSceneDetectionConfidence = 0.95;

/// Renders a plan into ground truth and noisy detections. Ground-truth boxes
/// follow the waypoints exactly; detections perturb the center by independent
/// Gaussian noise and are dropped during occlusion windows and at the
/// false-negative rate.
inline Scene generate_scene(const ScenePlan& plan) {
    plan.validate();
    Scene scene;
    scene.detections_per_frame.resize(static_cast<std::size_t>(plan.frames));

    for (std::size_t ti = 0; ti < plan.targets.size(); ++ti) {
        const TargetPlan& target = plan.targets[ti];
        Xoshiro256pp rng = Xoshiro256pp::stream(plan.seed, ti + 1);
        for (int frame = 1; frame <= plan.frames; ++frame) {
            const auto center = detail::target_center(target, frame);
            if (!center.has_value()) {
                continue;
            }
            const auto [u, v] = *center;
            const Box gt_box{u - 0.5 * target.box_w, v - 0.5 * target.box_h,
                             u + 0.5 * target.box_w, v + 0.5 * target.box_h};
            scene.ground_truth.push_back({frame, static_cast<int>(ti) + 1, gt_box});

            if (detail::occluded(target, frame)) {
                continue;
            }
            if (plan.false_negative_rate > 0.0 &&
                rng.uniform() < plan.false_negative_rate) {
                continue;
            }
            const double du = plan.sigma_u > 0.0 ? rng.normal(0.0, plan.sigma_u) : 0.0;
            const double dv = plan.sigma_v > 0.0 ? rng.normal(0.0, plan.sigma_v) : 0.0;
            const Box det_box{gt_box.x1 + du, gt_box.y1 + dv, gt_box.x2 + du,
                              gt_box.y2 + dv};
            scene.detections_per_frame[static_cast<std::size_t>(frame - 1)].push_back(
                {frame, det_box, kSceneDetectionConfidence});
        }
    }
    return scene;
}

// ---------------------------------------------------------------------------
// Finite-difference velocity noise
// ---------------------------------------------------------------------------

/// Empirical variance of the finite-difference speed estimate when both
/// endpoint positions carry i.i.d. Gaussian noise of the given sigma.
/// The analytic value is 2 sigma^2 / delta_t^2.
inline double velocity_variance_trial(double sigma, int delta_t, int trials,
                                      std::uint64_t seed) {
    if (delta_t < 1 || trials < 1) {
        throw std::invalid_argument("velocity_variance_trial: bad arguments");
    }
    Xoshiro256pp rng(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double a = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
        const double b = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
        const double speed_err = (b - a) / static_cast<double>(delta_t);
        sum += speed_err;
        sum_sq += speed_err * speed_err;
    }
    const double n = static_cast<double>(trials);
    return (sum_sq - sum * sum / n) / (n - 1.0);
}

// ---------------------------------------------------------------------------
// Error accumulation over an unobserved gap
// ---------------------------------------------------------------------------

enum class AccumulationMode {
    kSimplified,  // position plus T times a finite-difference velocity error
    kGeneral,     // velocity variance itself grows with the process noise
};

/// Closed-form position variance after T prediction-only steps, under the
/// model where each step adds the process noise and an independent draw of
/// the current velocity error:
///   var(u_T) = p_u0 + T (q_u + p_du0) + T(T-1)/2 q_du
inline double accumulation_variance_closed(double p_u0, double p_du0, double q_u,
                                           double q_du, int T) {
    const double t = static_cast<double>(T);
    return p_u0 + t * (q_u + p_du0) + 0.5 * t * (t - 1.0) * q_du;
}

/// Same quantity evaluated by stepping the scalar variance recursion
///   a <- a + b + q_u,  b <- b + q_du
/// one frame at a time (cross terms are absent in this model by construction).
inline double accumulation_variance_recursion(double p_u0, double p_du0, double q_u,
                                              double q_du, int T) {
    double a = p_u0;
    double b = p_du0;
    for (int i = 0; i < T; ++i) {
        a += b + q_u;
        b += q_du;
    }
    return a;
}

/// Ratio of the position-noise to velocity-noise contributions in the closed
/// form above, with p_u0 = q_u = sigma_u^2 and p_du0 = q_du = sigma_du^2:
///   beta = (T+1) sigma_u^2 / (T(T+1)/2 sigma_du^2)
inline double accumulation_beta_ratio(double sigma_u_sq, double sigma_du_sq, int T) {
    if (T < 1) {
        throw std::invalid_argument("accumulation_beta_ratio: T must be positive");
    }
    const double t = static_cast<double>(T);
    return ((t + 1.0) * sigma_u_sq) / (0.5 * t * (t + 1.0) * sigma_du_sq);
}

/// Monte-Carlo position variance after a T-step unobserved gap.
/// Simplified mode draws the velocity error once from the finite-difference
/// law (variance 2 sigma_u^2) and applies it T times, reproducing
/// var ~ 2 T^2 sigma_u^2. General mode redraws the accumulated velocity error
/// each step and adds per-step position process noise, reproducing the
/// closed form above with p = q.
inline double accumulation_trial(double sigma_u, double sigma_du, int T, int trials,
                                 std::uint64_t seed, AccumulationMode mode) {
    if (T < 0 || trials < 2) {
        throw std::invalid_argument("accumulation_trial: bad arguments");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int i = 0; i < trials; ++i) {
        Xoshiro256pp rng = Xoshiro256pp::stream(seed, static_cast<std::uint64_t>(i));
        double err = sigma_u > 0.0 ? rng.normal(0.0, sigma_u) : 0.0;
        if (mode == AccumulationMode::kSimplified) {
            const double a = sigma_u > 0.0 ? rng.normal(0.0, sigma_u) : 0.0;
            const double b = sigma_u > 0.0 ? rng.normal(0.0, sigma_u) : 0.0;
            err += static_cast<double>(T) * (b - a);
        } else {
            for (int t = 0; t < T; ++t) {
                const double vel_var =
                    sigma_du * sigma_du * static_cast<double>(1 + t);
                if (vel_var > 0.0) {
                    err += rng.normal(0.0, std::sqrt(vel_var));
                }
                if (sigma_u > 0.0) {
                    err += rng.normal(0.0, sigma_u);
                }
            }
        }
        sum += err;
        sum_sq += err * err;
    }
    const double n = static_cast<double>(trials);
    return (sum_sq - sum * sum / n) / (n - 1.0);
}

// ---------------------------------------------------------------------------
// Direction noise: density of the ratio of two correlated Gaussians
// ---------------------------------------------------------------------------

/// Parameters of the displacement ratio z = y / w with
/// [y w]^T ~ N([mu_y mu_w]^T, [[sy^2, rho sy sw], [rho sy sw, sw^2]]).
struct DirectionNoiseParams {
    double mu_y = 0.0;
    double mu_w = 0.0;
    double sigma_y = 1.0;
    double sigma_w = 1.0;
    double rho = 0.0;

    void validate() const {
        if (!(sigma_y > 0.0) || !(sigma_w > 0.0)) {
            throw std::invalid_argument("DirectionNoiseParams: sigma must be positive");
        }
        if (!(std::fabs(rho) < 1.0)) {
            throw std::invalid_argument("DirectionNoiseParams: |rho| must be < 1");
        }
    }
};

/// Standard normal CDF.
inline double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Closed-form density of z = y/w for correlated Gaussian y, w
/// (Hinkley, Biometrika 1969):
///   p(z) = g(z) d(z) / (sqrt(2 pi) sy sw r(z)^3)
///          * [Phi(g(z) / (beta r(z))) - Phi(-g(z) / (beta r(z)))]
///        + beta exp(-alpha / (2 beta^2)) / (pi sy sw r(z)^2)
/// with r, g, alpha, beta as below and d(z) the exponential factor.
inline double direction_noise_pdf(double z, const DirectionNoiseParams& p) {
    p.validate();
    const double sy = p.sigma_y;
    const double sw = p.sigma_w;
    const double beta = std::sqrt(1.0 - p.rho * p.rho);

    const double r = std::sqrt(z * z / (sy * sy) - 2.0 * p.rho * z / (sy * sw) +
                               1.0 / (sw * sw));
    const double g = p.mu_y * z / (sy * sy) -
                     p.rho * (p.mu_y + p.mu_w * z) / (sy * sw) + p.mu_w / (sw * sw);
    const double alpha = p.mu_y * p.mu_y / (sy * sy) -
                         2.0 * p.rho * p.mu_y * p.mu_w / (sy * sw) +
                         p.mu_w * p.mu_w / (sw * sw);

    const double d = std::exp((g * g - alpha * r * r) / (2.0 * beta * beta * r * r));
    const double phi_arg = g / (beta * r);
    const double first = g * d / (std::sqrt(2.0 * std::numbers::pi) * sy * sw * r * r * r) *
                         (std_normal_cdf(phi_arg) - std_normal_cdf(-phi_arg));
    const double second = beta * std::exp(-alpha / (2.0 * beta * beta)) /
                          (std::numbers::pi * sy * sw * r * r);
    const double density = first + second;
    if (!std::isfinite(density)) {
        throw std::runtime_error("direction_noise_pdf: non-finite density");
    }
    return density;
}

namespace detail {

inline double simpson_rule(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double fa, double b, double fb, double m, double fm,
                               double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_rule(a, fa, m, fm, flm);
    const double right = simpson_rule(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with an absolute tolerance target. The range
/// is pre-split into uniform panels so narrow peaks are not stepped over.
inline double integrate_adaptive(const std::function<double(double)>& f, double a,
                                 double b, double tol = 1e-6, int panels = 128) {
    double total = 0.0;
    const double h = (b - a) / static_cast<double>(panels);
    const double panel_tol = tol / static_cast<double>(panels);
    for (int i = 0; i < panels; ++i) {
        const double pa = a + h * static_cast<double>(i);
        const double pb = i + 1 == panels ? b : pa + h;
        const double pm = 0.5 * (pa + pb);
        const double fa = f(pa);
        const double fb = f(pb);
        const double fm = f(pm);
        const double whole = detail::simpson_rule(pa, fa, pb, fb, fm);
        total += detail::adaptive_simpson(f, pa, fa, pb, fb, pm, fm, whole, panel_tol, 40);
    }
    return total;
}

/// Histogram density of Monte-Carlo samples of z = y/w over [lo, hi) with the
/// given bin width, normalized by the total sample count. Samples outside the
/// range only affect normalization.
inline std::vector<double> ratio_sample_histogram(const DirectionNoiseParams& p,
                                                  int samples, std::uint64_t seed,
                                                  double lo, double hi,
                                                  double bin_width) {
    p.validate();
    if (samples < 1 || bin_width <= 0.0 || hi <= lo) {
        throw std::invalid_argument("ratio_sample_histogram: bad arguments");
    }
    const int bins = static_cast<int>(std::round((hi - lo) / bin_width));
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    Xoshiro256pp rng(seed);
    for (int i = 0; i < samples; ++i) {
        const double n1 = rng.normal();
        const double n2 = rng.normal();
        const double y = p.mu_y + p.sigma_y * n1;
        const double w = p.mu_w + p.sigma_w * (p.rho * n1 + std::sqrt(1.0 - p.rho * p.rho) * n2);
        if (w == 0.0) {
            continue;
        }
        const double z = y / w;
        if (z >= lo && z < hi) {
            const int b = static_cast<int>((z - lo) / bin_width);
            if (b >= 0 && b < bins) {
                counts[static_cast<std::size_t>(b)] += 1.0;
            }
        }
    }
    for (double& c : counts) {
        c /= static_cast<double>(samples) * bin_width;
    }
    return counts;
}

}  // namespace octrack
