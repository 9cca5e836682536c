#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "octrack/association.hpp"
#include "octrack/geometry.hpp"
#include "octrack/kalman.hpp"

namespace octrack {

/// One detector output: a box with confidence at a frame index.
struct Detection {
    int frame = 0;
    Box box;
    double confidence = 0.0;

    bool valid() const {
        return box.valid() && confidence >= 0.0 && confidence <= 1.0;
    }
};

enum class TrackStatus {
    kTentative,  // not yet confirmed by min_hits
    kTracked,    // confirmed and observed this frame
    kUntracked,  // missed at least the latest frame
};

struct TrackerConfig {
    double det_threshold = 0.6;  // 0.4 suits crowded scenes
    double iou_gate = 0.3;
    double lambda = 0.2;
    int delta_t = 3;
    int max_age = 30;
    int min_hits = 3;
    bool enable_oru = true;
    bool enable_ocm = true;
    bool enable_ocr = true;
    FilterParams filter = FilterParams::defaults();

    void validate() const {
        if (det_threshold < 0.0 || det_threshold > 1.0) {
            throw std::invalid_argument("det_threshold must be in [0,1]");
        }
        if (iou_gate < 0.0 || iou_gate > 1.0) {
            throw std::invalid_argument("iou_gate must be in [0,1]");
        }
        if (lambda < 0.0) {
            throw std::invalid_argument("lambda must be non-negative");
        }
        if (delta_t < 1) {
            throw std::invalid_argument("delta_t must be at least 1");
        }
        if (max_age < 1) {
            throw std::invalid_argument("max_age must be at least 1");
        }
        if (min_hits < 1) {
            throw std::invalid_argument("min_hits must be at least 1");
        }
    }
};

/// One tracked identity with its filter, observation history and lifecycle
/// counters. Ids are unique and strictly increasing per tracker instance.
struct Track {
    int id = 0;
    FilterState filter;
    FilterSnapshot snapshot;
    std::vector<TimedObservation> history;
    TrackStatus status = TrackStatus::kTentative;
    int hits = 0;
    int age_untracked = 0;

    const TimedObservation& last_observation() const { return history.back(); }

    /// Posterior state box; area and ratio are clamped to stay convertible
    /// after long prediction-only stretches.
    Box state_box() const {
        StateVector m = filter.mean;
        m[kStS] = std::max(m[kStS], 1e-6);
        m[kStR] = std::max(m[kStR], 1e-6);
        return state_to_box(m);
    }
};

/// One emitted row: a confirmed track's box at a frame.
struct TrackRecord {
    int frame = 0;
    int track_id = 0;
    Box box;
    double confidence = 0.0;
};

using FrameOutput = std::vector<TrackRecord>;

/// Evenly spaced observations across a gap, one per interior frame,
/// linear in every measured component. Endpoints are never emitted;
/// a gap without interior frames yields an empty sequence.
inline std::vector<TimedObservation> generate_virtual_trajectory(
    const ObservationVector& z1, int t1, const ObservationVector& z2, int t2) {
    std::vector<TimedObservation> out;
    if (t2 <= t1 + 1) {
        return out;
    }
    out.reserve(static_cast<std::size_t>(t2 - t1 - 1));
    const double span = static_cast<double>(t2 - t1);
    for (int t = t1 + 1; t < t2; ++t) {
        const double a = static_cast<double>(t - t1) / span;
        ObservationVector z;
        z.u = z1.u + a * (z2.u - z1.u);
        z.v = z1.v + a * (z2.v - z1.v);
        z.s = z1.s + a * (z2.s - z1.s);
        z.r = z1.r + a * (z2.r - z1.r);
        out.push_back({t, z});
    }
    return out;
}

/// Recovery pass over the leftovers of the primary association: plain IoU
/// between each track's last real observation box and the detections, solved
/// and gated like the primary pass. Indices are relative to the inputs.
inline AssignmentResult ocr_pass(std::span<const Box> last_observation_boxes,
                                 std::span<const Box> detections, double iou_gate) {
    const int n = static_cast<int>(last_observation_boxes.size());
    const int m = static_cast<int>(detections.size());
    CostMatrix cm;
    cm.values.resize(n, m);
    cm.iou.resize(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double overlap = iou(last_observation_boxes[i], detections[j]);
            cm.iou(i, j) = overlap;
            cm.values(i, j) = -overlap;
        }
    }
    return solve_assignment(cm, iou_gate);
}

/// Online multi-object tracker: per-frame IoU + direction-consistency
/// association, a recovery pass on the leftovers, filter re-update across
/// occlusion gaps, and track lifecycle management. One instance is
/// single-threaded and must be fed strictly increasing frame indices;
/// identical inputs and configuration produce identical outputs.
class OcSortTracker {
public:
    explicit OcSortTracker(TrackerConfig config = {}) : config_(std::move(config)) {
        config_.validate();
    }

    const TrackerConfig& config() const { return config_; }
    const std::vector<Track>& tracks() const { return tracks_; }

    /// Boxes emitted while each track was still tentative, keyed by id; used
    /// by offline head padding.
    const std::map<int, std::vector<TrackRecord>>& confirmation_records() const {
        return confirmation_records_;
    }

    FrameOutput step(int frame, std::span<const Detection> detections) {
        if (has_stepped_ && frame <= last_frame_) {
            throw std::invalid_argument("step: frame indices must be strictly increasing");
        }
        last_frame_ = frame;
        has_stepped_ = true;
        ++steps_;

        // Step 1: threshold detections, predict tracks, associate.
        std::vector<Detection> dets;
        dets.reserve(detections.size());
        for (const Detection& d : detections) {
            if (!d.valid()) {
                throw std::invalid_argument("step: invalid detection");
            }
            if (d.confidence >= config_.det_threshold) {
                dets.push_back(d);
            }
        }

        std::vector<Box> estimates(tracks_.size());
        std::vector<HistoryView> histories(tracks_.size());
        for (std::size_t i = 0; i < tracks_.size(); ++i) {
            tracks_[i].filter = predict(std::move(tracks_[i].filter));
            estimates[i] = tracks_[i].state_box();
            histories[i] = tracks_[i].history;
        }

        std::vector<Box> det_boxes(dets.size());
        for (std::size_t j = 0; j < dets.size(); ++j) {
            det_boxes[j] = dets[j].box;
        }

        const double lambda = config_.enable_ocm ? config_.lambda : 0.0;
        const CostMatrix cost =
            build_cost(estimates, det_boxes, histories, lambda, config_.delta_t);
        AssignmentResult assoc = solve_assignment(cost, config_.iou_gate);

        // Step 2: recovery pass on the leftovers by last real observation.
        if (config_.enable_ocr && !assoc.unmatched_tracks.empty() &&
            !assoc.unmatched_detections.empty()) {
            std::vector<Box> last_boxes;
            last_boxes.reserve(assoc.unmatched_tracks.size());
            for (const int ti : assoc.unmatched_tracks) {
                last_boxes.push_back(observation_box(tracks_[ti].last_observation().obs));
            }
            std::vector<Box> left_boxes;
            left_boxes.reserve(assoc.unmatched_detections.size());
            for (const int dj : assoc.unmatched_detections) {
                left_boxes.push_back(det_boxes[dj]);
            }

            const AssignmentResult recovery =
                ocr_pass(last_boxes, left_boxes, config_.iou_gate);
            std::vector<int> still_tracks;
            std::vector<int> still_dets;
            for (const int local : recovery.unmatched_tracks) {
                still_tracks.push_back(assoc.unmatched_tracks[local]);
            }
            for (const int local : recovery.unmatched_detections) {
                still_dets.push_back(assoc.unmatched_detections[local]);
            }
            for (const auto& [local_t, local_d] : recovery.matches) {
                assoc.matches.emplace_back(assoc.unmatched_tracks[local_t],
                                           assoc.unmatched_detections[local_d]);
            }
            assoc.unmatched_tracks = std::move(still_tracks);
            assoc.unmatched_detections = std::move(still_dets);
        }

        // Step 3: update matched tracks, re-updating across gaps.
        std::sort(assoc.matches.begin(), assoc.matches.end());
        std::map<int, double> matched_conf;  // track id -> detection confidence
        for (const auto& [ti, dj] : assoc.matches) {
            Track& track = tracks_[ti];
            const ObservationVector obs = box_to_observation(dets[dj].box);
            if (track.age_untracked > 0 && config_.enable_oru) {
                const std::vector<TimedObservation> virtual_obs = generate_virtual_trajectory(
                    track.last_observation().obs, track.snapshot.frame, obs, frame);
                track.filter =
                    re_update(track.filter, track.snapshot, virtual_obs, obs, frame);
            } else {
                track.filter = update(std::move(track.filter), obs);
            }
            track.history.push_back({frame, obs});
            track.snapshot = {track.filter.mean, track.filter.covariance, frame};
            track.age_untracked = 0;
            ++track.hits;
            track.status =
                track.hits >= config_.min_hits ? TrackStatus::kTracked : TrackStatus::kTentative;
            if (track.hits < config_.min_hits) {
                confirmation_records_[track.id].push_back(
                    {frame, track.id, track.state_box(), dets[dj].confidence});
            }
            matched_conf[track.id] = dets[dj].confidence;
        }

        // Step 4: age and expire unmatched tracks, then spawn new ones.
        std::vector<char> matched_this_frame(dets.size(), 0);
        for (const auto& [ti, dj] : assoc.matches) {
            matched_this_frame[dj] = 1;
        }
        for (const int ti : assoc.unmatched_tracks) {
            Track& track = tracks_[ti];
            ++track.age_untracked;
            track.status = TrackStatus::kUntracked;
            track.filter = dummy_update(std::move(track.filter));
        }
        std::erase_if(tracks_, [this](const Track& t) {
            return t.age_untracked >= config_.max_age;
        });

        for (std::size_t j = 0; j < dets.size(); ++j) {
            if (matched_this_frame[j]) {
                continue;
            }
            Track track;
            track.id = next_id_++;
            const ObservationVector obs = box_to_observation(dets[j].box);
            track.filter = init_filter(obs, config_.filter);
            track.snapshot = {track.filter.mean, track.filter.covariance, frame};
            track.history.push_back({frame, obs});
            track.hits = 1;
            track.age_untracked = 0;
            track.status = TrackStatus::kTentative;
            if (track.hits < config_.min_hits) {
                confirmation_records_[track.id].push_back(
                    {frame, track.id, track.state_box(), dets[j].confidence});
            }
            matched_conf[track.id] = dets[j].confidence;
            tracks_.push_back(std::move(track));
        }

        // Emit confirmed tracks observed this frame; the first min_hits steps
        // of the sequence waive confirmation.
        FrameOutput output;
        for (const Track& track : tracks_) {
            if (track.age_untracked != 0) {
                continue;
            }
            if (track.hits >= config_.min_hits || steps_ <= config_.min_hits) {
                output.push_back(
                    {frame, track.id, track.state_box(), matched_conf.at(track.id)});
            }
        }
        return output;
    }

private:
    static Box observation_box(const ObservationVector& obs) {
        const double w = std::sqrt(obs.s * obs.r);
        const double h = obs.s / w;
        return Box{obs.u - 0.5 * w, obs.v - 0.5 * h, obs.u + 0.5 * w, obs.v + 0.5 * h};
    }

    TrackerConfig config_;
    std::vector<Track> tracks_;
    std::map<int, std::vector<TrackRecord>> confirmation_records_;
    int next_id_ = 1;
    int last_frame_ = 0;
    bool has_stepped_ = false;
    long steps_ = 0;
};

}  // namespace octrack
