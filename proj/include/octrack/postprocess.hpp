#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "octrack/geometry.hpp"
#include "octrack/tracker.hpp"

namespace octrack {

struct TrackletEntry {
    int frame = 0;
    Box box;
    double confidence = 0.0;
};

/// Per-identity result rows, frames strictly increasing within each track.
using TrackletSet = std::map<int, std::vector<TrackletEntry>>;

inline TrackletSet to_tracklets(const std::vector<TrackRecord>& records) {
    TrackletSet ts;
    for (const TrackRecord& r : records) {
        ts[r.track_id].push_back({r.frame, r.box, r.confidence});
    }
    for (auto& [id, entries] : ts) {
        std::sort(entries.begin(), entries.end(),
                  [](const TrackletEntry& a, const TrackletEntry& b) {
                      return a.frame < b.frame;
                  });
        for (std::size_t i = 1; i < entries.size(); ++i) {
            if (entries[i].frame == entries[i - 1].frame) {
                throw std::invalid_argument("to_tracklets: duplicate (id, frame)");
            }
        }
    }
    return ts;
}

/// Fills internal gaps of at most max_gap missing frames by per-component
/// linear interpolation of the bracketing boxes; applies only to tracks whose
/// observed span covers at least min_len frames. Inserted entries take the
/// mean of the bracketing confidences. Observed entries are never modified,
/// so the transform is idempotent.
inline TrackletSet linear_interpolate(const TrackletSet& ts, int max_gap = 20,
                                      int min_len = 30) {
    TrackletSet out;
    for (const auto& [id, entries] : ts) {
        std::vector<TrackletEntry> filled;
        const int span =
            entries.empty() ? 0 : entries.back().frame - entries.front().frame + 1;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i > 0 && span >= min_len) {
                const TrackletEntry& prev = entries[i - 1];
                const TrackletEntry& next = entries[i];
                const int gap = next.frame - prev.frame - 1;
                if (gap >= 1 && gap <= max_gap) {
                    const double denom = static_cast<double>(next.frame - prev.frame);
                    for (int f = prev.frame + 1; f < next.frame; ++f) {
                        const double a = static_cast<double>(f - prev.frame) / denom;
                        TrackletEntry e;
                        e.frame = f;
                        e.box.x1 = prev.box.x1 + a * (next.box.x1 - prev.box.x1);
                        e.box.y1 = prev.box.y1 + a * (next.box.y1 - prev.box.y1);
                        e.box.x2 = prev.box.x2 + a * (next.box.x2 - prev.box.x2);
                        e.box.y2 = prev.box.y2 + a * (next.box.y2 - prev.box.y2);
                        e.confidence = 0.5 * (prev.confidence + next.confidence);
                        filled.push_back(e);
                    }
                }
            }
            filled.push_back(entries[i]);
        }
        out[id] = std::move(filled);
    }
    return out;
}

/// Writes the tentative-phase rows of ultimately confirmed tracks back in
/// front of their first emitted frame. Tracks absent from the result set are
/// ignored; frames already present are left untouched.
inline TrackletSet head_padding(
    const TrackletSet& ts,
    const std::map<int, std::vector<TrackRecord>>& confirmation_records) {
    TrackletSet out = ts;
    for (auto& [id, entries] : out) {
        const auto rec = confirmation_records.find(id);
        if (rec == confirmation_records.end() || entries.empty()) {
            continue;
        }
        const int first_emitted = entries.front().frame;
        std::vector<TrackletEntry> prefix;
        for (const TrackRecord& r : rec->second) {
            if (r.frame < first_emitted) {
                prefix.push_back({r.frame, r.box, r.confidence});
            }
        }
        entries.insert(entries.begin(), prefix.begin(), prefix.end());
    }
    return out;
}

}  // namespace octrack
