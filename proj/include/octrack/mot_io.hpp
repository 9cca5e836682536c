#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "octrack/postprocess.hpp"
#include "octrack/tracker.hpp"

namespace octrack {

/// One line of the comma-separated challenge format:
/// frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z
/// with id = -1 for raw detections and -1 placeholders for the 3D fields.
struct MotRow {
    int frame = 0;
    int id = -1;
    double left = 0.0;
    double top = 0.0;
    double width = 0.0;
    double height = 0.0;
    double conf = 0.0;
    double x = -1.0;
    double y = -1.0;
    double z = -1.0;
};

struct ParseIssue {
    int line = 0;
    std::string message;
};

enum class ParseMode {
    kStrict,   // first malformed line aborts with an exception
    kLenient,  // malformed lines are collected and skipped
};

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) {
        ++begin;
    }
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t' || *(end - 1) == '\r')) {
        --end;
    }
    if (begin == end) {
        return false;
    }
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline bool parse_row(std::string_view line, MotRow& row, std::string& error) {
    const std::vector<std::string_view> fields = split_fields(line);
    if (fields.size() < 7) {
        error = "expected at least 7 comma-separated fields, got " +
                std::to_string(fields.size());
        return false;
    }
    double values[10] = {0, 0, 0, 0, 0, 0, 0, -1, -1, -1};
    const std::size_t n = std::min<std::size_t>(fields.size(), 10);
    for (std::size_t i = 0; i < n; ++i) {
        if (!parse_double(fields[i], values[i])) {
            error = "non-numeric field " + std::to_string(i + 1);
            return false;
        }
    }
    row.frame = static_cast<int>(values[0]);
    row.id = static_cast<int>(values[1]);
    row.left = values[2];
    row.top = values[3];
    row.width = values[4];
    row.height = values[5];
    row.conf = values[6];
    row.x = values[7];
    row.y = values[8];
    row.z = values[9];
    if (row.frame < 1) {
        error = "frame index must be >= 1";
        return false;
    }
    if (row.width <= 0.0 || row.height <= 0.0) {
        error = "non-positive box size";
        return false;
    }
    return true;
}

inline bool blank(std::string_view line) {
    for (const char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') {
            return false;
        }
    }
    return true;
}

template <typename RowSink>
inline std::vector<ParseIssue> parse_lines(std::istream& in, ParseMode mode,
                                           RowSink&& sink) {
    std::vector<ParseIssue> issues;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        MotRow row;
        std::string error;
        if (!parse_row(line, row, error)) {
            if (mode == ParseMode::kStrict) {
                throw ParseError(line_no, error);
            }
            issues.push_back({line_no, error});
            continue;
        }
        sink(row);
    }
    return issues;
}

}  // namespace detail

struct DetectionFile {
    std::map<int, std::vector<Detection>> by_frame;  // frames ascending
    std::vector<ParseIssue> issues;                  // lenient mode only
};

/// Parses a detection file: rows are grouped by frame in ascending order and
/// boxes converted from left/top/size to corner format. Line order within a
/// frame is preserved; shuffled input yields the same grouped structure.
inline DetectionFile parse_detections(std::istream& in, ParseMode mode = ParseMode::kStrict) {
    DetectionFile file;
    file.issues = detail::parse_lines(in, mode, [&file](const MotRow& row) {
        const Box box{row.left, row.top, row.left + row.width, row.top + row.height};
        file.by_frame[row.frame].push_back({row.frame, box, row.conf});
    });
    return file;
}

struct ResultFile {
    TrackletSet tracks;
    std::vector<ParseIssue> issues;
};

/// Parses a result file (rows carry positive track ids) into tracklets.
inline ResultFile parse_results(std::istream& in, ParseMode mode = ParseMode::kStrict) {
    ResultFile file;
    std::vector<TrackRecord> records;
    file.issues = detail::parse_lines(in, mode, [&records](const MotRow& row) {
        const Box box{row.left, row.top, row.left + row.width, row.top + row.height};
        records.push_back({row.frame, row.id, box, row.conf});
    });
    file.tracks = to_tracklets(records);
    return file;
}

/// Writes result rows sorted by (frame, id) with fixed two-decimal reals.
/// write(parse(write(x))) is byte-identical to write(x).
inline void write_results(std::ostream& out, const TrackletSet& tracks) {
    std::vector<TrackRecord> rows;
    for (const auto& [id, entries] : tracks) {
        for (const TrackletEntry& e : entries) {
            rows.push_back({e.frame, id, e.box, e.confidence});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const TrackRecord& a, const TrackRecord& b) {
        return std::pair(a.frame, a.track_id) < std::pair(b.frame, b.track_id);
    });
    char buf[192];
    for (const TrackRecord& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.2f,%.2f,%.2f,%.2f,%.2f,-1,-1,-1\n",
                      r.frame, r.track_id, r.box.x1, r.box.y1, r.box.width(),
                      r.box.height(), r.confidence);
        out << buf;
    }
}

inline std::string write_results(const TrackletSet& tracks) {
    std::ostringstream oss;
    write_results(oss, tracks);
    return oss.str();
}

/// Writes detections (id -1) in the same schema, sorted by frame.
inline void write_detections(std::ostream& out,
                             const std::map<int, std::vector<Detection>>& by_frame) {
    char buf[192];
    for (const auto& [frame, dets] : by_frame) {
        for (const Detection& d : dets) {
            std::snprintf(buf, sizeof(buf), "%d,-1,%.2f,%.2f,%.2f,%.2f,%.2f,-1,-1,-1\n",
                          frame, d.box.x1, d.box.y1, d.box.width(), d.box.height(),
                          d.confidence);
            out << buf;
        }
    }
}

}  // namespace octrack
