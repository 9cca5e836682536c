#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "octrack/assignment.hpp"
#include "octrack/geometry.hpp"
#include "octrack/postprocess.hpp"

namespace octrack {

/// CLEAR-style evaluation summary. The per-frame matching maximizes total
/// IoU over pairs above the match threshold; identity scores come from a
/// global bipartite matching over accumulated per-frame overlap counts.
struct EvalReport {
    double mota = 0.0;
    double idf1 = 0.0;
    int id_switches = 0;
    int fragmentations = 0;
    int fp = 0;
    int fn = 0;
    int tp = 0;
    int total_gt = 0;
    /// frame -> matched (gt_id, pred_id) pairs
    std::map<int, std::vector<std::pair<int, int>>> frame_matches;
};

namespace detail {

struct FrameBoxes {
    std::vector<int> ids;
    std::vector<Box> boxes;
};

inline std::map<int, FrameBoxes> by_frame(const TrackletSet& ts) {
    std::map<int, FrameBoxes> out;
    std::set<std::pair<int, int>> seen;
    for (const auto& [id, entries] : ts) {
        for (const TrackletEntry& e : entries) {
            if (!seen.insert({id, e.frame}).second) {
                throw std::invalid_argument("evaluate: duplicate (id, frame) entry");
            }
            out[e.frame].ids.push_back(id);
            out[e.frame].boxes.push_back(e.box);
        }
    }
    return out;
}

}  // namespace detail

inline EvalReport evaluate(const TrackletSet& gt, const TrackletSet& pred,
                           double iou_match = 0.5) {
    const std::map<int, detail::FrameBoxes> gt_frames = detail::by_frame(gt);
    const std::map<int, detail::FrameBoxes> pred_frames = detail::by_frame(pred);

    EvalReport report;
    for (const auto& [frame, g] : gt_frames) {
        report.total_gt += static_cast<int>(g.ids.size());
    }

    // Accumulated per-identity overlap counts for the identity-level score.
    std::map<std::pair<int, int>, int> overlap_counts;
    int total_pred = 0;

    // Last matched predicted id and pending-interruption flag per gt id.
    std::map<int, int> last_matched_pred;
    std::map<int, bool> interrupted;

    std::set<int> frames;
    for (const auto& [frame, g] : gt_frames) {
        frames.insert(frame);
    }
    for (const auto& [frame, p] : pred_frames) {
        frames.insert(frame);
    }

    for (const int frame : frames) {
        const auto git = gt_frames.find(frame);
        const auto pit = pred_frames.find(frame);
        const int n = git == gt_frames.end() ? 0 : static_cast<int>(git->second.ids.size());
        const int m = pit == pred_frames.end() ? 0 : static_cast<int>(pit->second.ids.size());
        total_pred += m;

        std::vector<int> gt_match(n, -1);  // index into pred boxes
        if (n > 0 && m > 0) {
            Eigen::MatrixXd cost(n, m);
            Eigen::MatrixXd overlaps(n, m);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < m; ++j) {
                    const double o = iou(git->second.boxes[i], pit->second.boxes[j]);
                    overlaps(i, j) = o;
                    cost(i, j) = -o;
                    if (o >= iou_match) {
                        ++overlap_counts[{git->second.ids[i], pit->second.ids[j]}];
                    }
                }
            }
            const std::vector<int> assignment = solve_lap(cost);
            for (int i = 0; i < n; ++i) {
                const int j = assignment[i];
                if (j >= 0 && overlaps(i, j) >= iou_match) {
                    gt_match[i] = j;
                }
            }
        }

        int matched = 0;
        for (int i = 0; i < n; ++i) {
            const int gid = git->second.ids[i];
            if (gt_match[i] >= 0) {
                const int pid = pit->second.ids[gt_match[i]];
                ++matched;
                report.frame_matches[frame].emplace_back(gid, pid);
                const auto prev = last_matched_pred.find(gid);
                if (prev != last_matched_pred.end() && prev->second != pid) {
                    ++report.id_switches;
                }
                if (interrupted[gid]) {
                    ++report.fragmentations;
                }
                last_matched_pred[gid] = pid;
                interrupted[gid] = false;
            } else if (last_matched_pred.contains(gid)) {
                interrupted[gid] = true;
            }
        }
        report.tp += matched;
        report.fn += n - matched;
        report.fp += m - matched;
    }

    report.mota =
        report.total_gt == 0
            ? 0.0
            : 1.0 - static_cast<double>(report.fp + report.fn + report.id_switches) /
                        static_cast<double>(report.total_gt);

    // Identity-level F1 over the global matching of accumulated overlaps.
    std::vector<int> gt_ids;
    std::vector<int> pred_ids;
    for (const auto& [id, entries] : gt) {
        gt_ids.push_back(id);
    }
    for (const auto& [id, entries] : pred) {
        pred_ids.push_back(id);
    }
    int idtp = 0;
    if (!gt_ids.empty() && !pred_ids.empty()) {
        Eigen::MatrixXd cost =
            Eigen::MatrixXd::Zero(static_cast<int>(gt_ids.size()),
                                  static_cast<int>(pred_ids.size()));
        for (std::size_t i = 0; i < gt_ids.size(); ++i) {
            for (std::size_t j = 0; j < pred_ids.size(); ++j) {
                const auto it = overlap_counts.find({gt_ids[i], pred_ids[j]});
                if (it != overlap_counts.end()) {
                    cost(static_cast<int>(i), static_cast<int>(j)) =
                        -static_cast<double>(it->second);
                }
            }
        }
        const std::vector<int> assignment = solve_lap(cost);
        for (std::size_t i = 0; i < gt_ids.size(); ++i) {
            const int j = assignment[i];
            if (j >= 0) {
                const auto it = overlap_counts.find({gt_ids[i], pred_ids[j]});
                if (it != overlap_counts.end()) {
                    idtp += it->second;
                }
            }
        }
    }
    report.idf1 = (report.total_gt + total_pred) == 0
                      ? 0.0
                      : 2.0 * static_cast<double>(idtp) /
                            static_cast<double>(report.total_gt + total_pred);
    return report;
}

}  // namespace octrack
