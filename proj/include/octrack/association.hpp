#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "octrack/assignment.hpp"
#include "octrack/geometry.hpp"
#include "octrack/kalman.hpp"

namespace octrack {

/// Full-quadrant direction of the displacement old -> new, in (-pi, pi].
/// Zero displacement has no direction and yields an empty optional.
inline std::optional<double> direction_angle(double u_old, double v_old,
                                             double u_new, double v_new) {
    const double du = u_new - u_old;
    const double dv = v_new - v_old;
    if (du == 0.0 && dv == 0.0) {
        return std::nullopt;
    }
    return std::atan2(dv, du);
}

/// Smallest absolute angular difference on the circle, in [0, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 2.0 * std::numbers::pi);
    if (d > std::numbers::pi) {
        d = 2.0 * std::numbers::pi - d;
    }
    return d;
}

/// Pairwise association costs between track estimates and detections:
/// negative IoU plus a weighted direction-consistency term. The raw IoU
/// matrix is kept alongside for gating.
struct CostMatrix {
    Eigen::MatrixXd values;  // tracks x detections
    Eigen::MatrixXd iou;     // same shape, plain IoU

    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> gate_mask(double gate) const {
        return iou.array() >= gate;
    }
};

/// Outcome of one assignment pass. Matches are (track_index, det_index);
/// the three sets partition both index ranges.
struct AssignmentResult {
    std::vector<std::pair<int, int>> matches;
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_detections;
};

/// Per-track observation history used for the direction term; entries are
/// in strictly increasing frame order.
using HistoryView = std::span<const TimedObservation>;

namespace detail {

// Direction anchor for a track: the newest observation at least `delta_t`
// frames older than the latest one, falling back to the oldest available.
inline const TimedObservation& direction_anchor(HistoryView history, int delta_t) {
    const int target = history.back().frame - delta_t;
    const TimedObservation* anchor = nullptr;
    for (const TimedObservation& obs : history) {
        if (obs.frame <= target) {
            anchor = &obs;
        } else {
            break;
        }
    }
    return anchor != nullptr ? *anchor : history.front();
}

}  // namespace detail

/// Builds the association cost matrix C = -IoU + lambda * dtheta, where
/// dtheta compares a track's recent motion direction (anchor observation to
/// latest observation, the anchor taken delta_t frames back or the oldest
/// available) against the direction from its latest observation to each
/// detection. Tracks with fewer than two observations, and any pair with an
/// undefined direction, contribute a neutral direction term.
inline CostMatrix build_cost(std::span<const Box> estimates,
                             std::span<const Box> detections,
                             std::span<const HistoryView> histories, double lambda,
                             int delta_t) {
    if (histories.size() != estimates.size()) {
        throw std::invalid_argument("build_cost: one history per track required");
    }
    if (delta_t < 1) {
        throw std::invalid_argument("build_cost: delta_t must be at least 1");
    }
    const int n = static_cast<int>(estimates.size());
    const int m = static_cast<int>(detections.size());

    CostMatrix cm;
    cm.values.resize(n, m);
    cm.iou.resize(n, m);

    for (int i = 0; i < n; ++i) {
        std::optional<double> theta_track;
        const TimedObservation* latest = nullptr;
        if (histories[i].size() >= 2) {
            const TimedObservation& anchor = detail::direction_anchor(histories[i], delta_t);
            latest = &histories[i].back();
            theta_track = direction_angle(anchor.obs.u, anchor.obs.v, latest->obs.u,
                                          latest->obs.v);
        }
        for (int j = 0; j < m; ++j) {
            const double overlap = iou(estimates[i], detections[j]);
            cm.iou(i, j) = overlap;
            double dtheta = 0.0;
            if (theta_track.has_value()) {
                const std::optional<double> theta_intention =
                    direction_angle(latest->obs.u, latest->obs.v,
                                    detections[j].center_u(), detections[j].center_v());
                if (theta_intention.has_value()) {
                    dtheta = angle_diff(*theta_track, *theta_intention);
                }
            }
            cm.values(i, j) = -overlap + lambda * dtheta;
        }
    }
    return cm;
}

/// Optimal assignment over the cost matrix followed by IoU gating: matched
/// pairs whose IoU falls below the gate are demoted to unmatched on both
/// sides. Empty inputs produce empty matches with everything unmatched.
inline AssignmentResult solve_assignment(const CostMatrix& cost, double iou_gate) {
    const int n = static_cast<int>(cost.values.rows());
    const int m = static_cast<int>(cost.values.cols());

    AssignmentResult result;
    std::vector<int> row_to_col(n, -1);
    if (n > 0 && m > 0) {
        row_to_col = solve_lap(cost.values);
    }

    std::vector<char> det_matched(m, 0);
    for (int i = 0; i < n; ++i) {
        const int j = row_to_col[i];
        if (j >= 0 && cost.iou(i, j) >= iou_gate) {
            result.matches.emplace_back(i, j);
            det_matched[j] = 1;
        } else {
            result.unmatched_tracks.push_back(i);
        }
    }
    for (int j = 0; j < m; ++j) {
        if (!det_matched[j]) {
            result.unmatched_detections.push_back(j);
        }
    }
    return result;
}

}  // namespace octrack
