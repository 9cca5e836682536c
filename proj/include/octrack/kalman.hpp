#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "octrack/geometry.hpp"

namespace octrack {

inline constexpr int kStateDim = 7;
inline constexpr int kObsDim = 4;

using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using StateMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using ObsMatrix = Eigen::Matrix<double, kObsDim, kObsDim>;
using ObsModelMatrix = Eigen::Matrix<double, kObsDim, kStateDim>;

/// Indices into the 7-dim state [u, v, s, r, u_dot, v_dot, s_dot]:
/// center position, box area, aspect ratio, and their time derivatives
/// (the ratio is modelled as constant).
enum StateIndex : int {
    kStU = 0,
    kStV = 1,
    kStS = 2,
    kStR = 3,
    kStDu = 4,
    kStDv = 5,
    kStDs = 6,
};

/// Measured components of a detection box: center, area, aspect ratio.
struct ObservationVector {
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    double r = 0.0;

    Eigen::Matrix<double, kObsDim, 1> vec() const {
        return {u, v, s, r};
    }

    bool valid() const {
        return std::isfinite(u) && std::isfinite(v) && std::isfinite(s) &&
               std::isfinite(r) && s > 0.0 && r > 0.0;
    }
};

/// Noise configuration of the constant-velocity box filter. The process and
/// observation noise follow the standard SORT convention; all three vectors
/// are diagonals and may be overridden per tracker.
struct FilterParams {
    StateVector initial_variance;
    StateVector process_noise;
    Eigen::Matrix<double, kObsDim, 1> observation_noise;

    static FilterParams defaults() {
        FilterParams p;
        p.initial_variance << 10.0, 10.0, 10.0, 10.0, 1e4, 1e4, 1e4;
        p.process_noise << 1.0, 1.0, 1.0, 1.0, 0.01, 0.01, 0.0001;
        p.observation_noise << 1.0, 1.0, 10.0, 10.0;
        return p;
    }
};

/// Full filter value: mean, covariance and the model matrices. Plain value
/// type; every operation below maps an input state to an output state.
struct FilterState {
    StateVector mean = StateVector::Zero();
    StateMatrix covariance = StateMatrix::Zero();
    StateMatrix transition = StateMatrix::Zero();       // F
    ObsModelMatrix observation = ObsModelMatrix::Zero();  // H
    StateMatrix process_noise = StateMatrix::Zero();    // Q
    ObsMatrix observation_noise = ObsMatrix::Zero();    // R
};

/// Mean/covariance checkpoint taken at the last real observation, used to
/// rewind the filter when a track is recovered after a gap.
struct FilterSnapshot {
    StateVector mean = StateVector::Zero();
    StateMatrix covariance = StateMatrix::Zero();
    int frame = 0;
};

struct TimedObservation {
    int frame = 0;
    ObservationVector obs;
};

/// Converts a corner-format box to the measured state components.
/// Throws std::invalid_argument for boxes without positive extent.
inline ObservationVector box_to_observation(const Box& box) {
    if (!box.valid()) {
        throw std::invalid_argument("box_to_observation: degenerate box");
    }
    ObservationVector z;
    z.u = box.center_u();
    z.v = box.center_v();
    z.s = box.width() * box.height();
    z.r = box.width() / box.height();
    return z;
}

/// Inverse of box_to_observation on the positional components of a state.
/// Throws std::domain_error when area or ratio is not positive; callers that
/// may hold drifted states clamp before converting.
inline Box state_to_box(const StateVector& state) {
    const double s = state[kStS];
    const double r = state[kStR];
    if (!(s > 0.0) || !(r > 0.0)) {
        throw std::domain_error("state_to_box: non-positive area or ratio");
    }
    const double w = std::sqrt(s * r);
    const double h = s / w;
    return Box{state[kStU] - 0.5 * w, state[kStV] - 0.5 * h,
               state[kStU] + 0.5 * w, state[kStV] + 0.5 * h};
}

/// Builds a filter centered on an observation with zero velocities.
inline FilterState init_filter(const ObservationVector& obs,
                               const FilterParams& params = FilterParams::defaults()) {
    FilterState fs;
    fs.mean.head<kObsDim>() = obs.vec();

    fs.covariance = params.initial_variance.asDiagonal();
    fs.process_noise = params.process_noise.asDiagonal();
    fs.observation_noise = params.observation_noise.asDiagonal();

    fs.transition = StateMatrix::Identity();
    fs.transition(kStU, kStDu) = 1.0;
    fs.transition(kStV, kStDv) = 1.0;
    fs.transition(kStS, kStDs) = 1.0;

    fs.observation.setZero();
    for (int i = 0; i < kObsDim; ++i) {
        fs.observation(i, i) = 1.0;
    }
    return fs;
}

/// One constant-velocity transition step (unit frame interval).
/// The area velocity is zeroed when it would drive the area non-positive.
inline FilterState predict(FilterState fs) {
    if (fs.mean[kStS] + fs.mean[kStDs] <= 0.0) {
        fs.mean[kStDs] = 0.0;
    }
    fs.mean = fs.transition * fs.mean;
    fs.covariance =
        fs.transition * fs.covariance * fs.transition.transpose() + fs.process_noise;
    return fs;
}

/// Measurement update. The innovation covariance is inverted via Cholesky;
/// a positive-definite R guarantees the factorization succeeds.
inline FilterState update(FilterState fs, const ObservationVector& z) {
    const ObsMatrix s_mat =
        fs.observation * fs.covariance * fs.observation.transpose() + fs.observation_noise;
    const Eigen::LLT<ObsMatrix> llt(s_mat);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("update: innovation covariance not positive definite");
    }
    const Eigen::Matrix<double, kStateDim, kObsDim> gain =
        llt.solve(fs.observation * fs.covariance).transpose();

    fs.mean += gain * (z.vec() - fs.observation * fs.mean);
    fs.covariance =
        (StateMatrix::Identity() - gain * fs.observation) * fs.covariance;
    fs.covariance = (0.5 * (fs.covariance + fs.covariance.transpose())).eval();
    return fs;
}

/// Update with no observation: the priori estimate is adopted as posteriori.
/// Exact identity on mean and covariance.
inline FilterState dummy_update(FilterState fs) {
    return fs;
}

/// Rewinds the filter to the snapshot and replays predict/update through the
/// gap: each interior frame consumes its virtual observation, the final frame
/// consumes the real re-associating observation. Pure in all arguments; any
/// dummy updates applied to the live filter during the gap are discarded.
///
/// Preconditions: virtual observation frames strictly increasing and strictly
/// inside (snapshot.frame, final_frame). An empty span with
/// final_frame == snapshot.frame + 1 degenerates to plain predict + update.
inline FilterState re_update(const FilterState& model, const FilterSnapshot& snapshot,
                             std::span<const TimedObservation> virtual_obs,
                             const ObservationVector& final_obs, int final_frame) {
    if (final_frame <= snapshot.frame) {
        throw std::invalid_argument("re_update: final frame must follow the snapshot");
    }
    int prev = snapshot.frame;
    for (const TimedObservation& v : virtual_obs) {
        if (v.frame <= prev || v.frame >= final_frame) {
            throw std::invalid_argument("re_update: virtual frames must be strictly "
                                        "increasing inside the gap");
        }
        prev = v.frame;
    }

    FilterState fs = model;
    fs.mean = snapshot.mean;
    fs.covariance = snapshot.covariance;

    std::size_t next = 0;
    for (int t = snapshot.frame + 1; t <= final_frame; ++t) {
        fs = predict(std::move(fs));
        if (t == final_frame) {
            fs = update(std::move(fs), final_obs);
        } else if (next < virtual_obs.size() && virtual_obs[next].frame == t) {
            fs = update(std::move(fs), virtual_obs[next].obs);
            ++next;
        }
        // Interior frames without a virtual observation keep the priori
        // estimate, matching the no-observation behavior of the live filter.
    }
    return fs;
}

}  // namespace octrack
