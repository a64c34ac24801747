#include "twistmodel/mocap.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "twistmodel/convex_hull.hpp"
#include "twistmodel/text.hpp"

namespace twistmodel {

namespace {

const std::string kMarkerHeader = "frame,time_s,marker_id,x_mm,y_mm,z_mm";
const std::string kTrialHeader = "trial,mode,x_mm,y_mm,z_mm";

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

MarkerTrajectories load_trajectories(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty stream, expected header");
    line = strip_cr(line);
    bool has_config = false;
    if (line == kMarkerHeader + ",config") {
        has_config = true;
    } else if (line != kMarkerHeader) {
        throw ParseError(1, "expected header '" + kMarkerHeader + "'");
    }

    MarkerTrajectories trajectories;
    std::set<std::pair<int, std::string>> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split(line, ',');
        const size_t expected = has_config ? 7 : 6;
        if (fields.size() != expected)
            throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, got " +
                                          std::to_string(fields.size()));

        MarkerSample sample;
        auto frame = parse_int(fields[0]);
        if (!frame || *frame < 0) throw ParseError(line_no, "invalid frame");
        sample.frame = static_cast<int>(*frame);
        auto time = parse_double(fields[1]);
        if (!time || !std::isfinite(*time)) throw ParseError(line_no, "invalid time_s");
        sample.time_s = *time;
        sample.marker_id = std::string(trim(fields[2]));
        if (sample.marker_id.empty()) throw ParseError(line_no, "empty marker_id");
        for (int c = 0; c < 3; ++c) {
            auto value = parse_double(fields[3 + c]);
            if (!value || !std::isfinite(*value))
                throw ParseError(line_no, "invalid coordinate");
            sample.position_mm[c] = *value;
        }
        if (has_config) sample.config = std::string(trim(fields[6]));

        if (!seen.emplace(sample.frame, sample.marker_id).second)
            throw DuplicateSampleError("line " + std::to_string(line_no) +
                                       ": duplicate sample for marker '" + sample.marker_id +
                                       "' at frame " + std::to_string(sample.frame));
        trajectories[sample.marker_id].push_back(std::move(sample));
    }

    for (auto& [id, samples] : trajectories) {
        std::sort(samples.begin(), samples.end(),
                  [](const MarkerSample& a, const MarkerSample& b) { return a.frame < b.frame; });
        for (size_t i = 1; i < samples.size(); ++i) {
            if (samples[i].time_s < samples[i - 1].time_s)
                throw ParseError(0, "marker '" + id + "': time_s decreases at frame " +
                                        std::to_string(samples[i].frame));
        }
    }
    return trajectories;
}

void save_trajectories(std::ostream& out, const MarkerTrajectories& trajectories) {
    bool has_config = false;
    for (const auto& [id, samples] : trajectories)
        for (const auto& s : samples)
            if (!s.config.empty()) has_config = true;

    out << kMarkerHeader << (has_config ? ",config" : "") << "\n";
    for (const auto& [id, samples] : trajectories) {
        for (const auto& s : samples) {
            out << s.frame << ',' << format_double(s.time_s) << ',' << s.marker_id << ','
                << format_double(s.position_mm.x()) << ',' << format_double(s.position_mm.y())
                << ',' << format_double(s.position_mm.z());
            if (has_config) out << ',' << s.config;
            out << "\n";
        }
    }
}

int max_displacement_frame(const std::vector<MarkerSample>& samples) {
    if (samples.empty())
        throw DegenerateInputError("max_displacement_frame: empty trajectory");
    const Eigen::Vector3d origin = samples.front().position_mm;
    int best_frame = samples.front().frame;
    double best_dist = -1.0;
    for (const auto& s : samples) {
        double d = (s.position_mm - origin).norm();
        if (d > best_dist) {
            best_dist = d;
            best_frame = s.frame;
        }
    }
    return best_frame;
}

int best_circle_frame(const MarkerTrajectories& trajectories,
                      const std::set<std::string>& reference_ids) {
    std::map<int, int> visible;  // frame -> non-reference marker count
    for (const auto& [id, samples] : trajectories) {
        if (reference_ids.count(id)) continue;
        for (const auto& s : samples) ++visible[s.frame];
    }
    if (visible.empty())
        throw DegenerateInputError("best_circle_frame: no non-reference samples");
    int best_frame = visible.begin()->first;
    int best_count = 0;
    for (const auto& [frame, count] : visible) {
        if (count > best_count) {  // ties keep the lowest frame
            best_count = count;
            best_frame = frame;
        }
    }
    return best_frame;
}

Circle2D experimental_twist_radius(const MarkerTrajectories& trajectories, int frame,
                                   const std::set<std::string>& reference_ids) {
    std::vector<Eigen::Vector2d> points;
    std::vector<std::string> missing;
    for (const auto& [id, samples] : trajectories) {
        if (reference_ids.count(id)) continue;
        auto it = std::find_if(samples.begin(), samples.end(),
                               [&](const MarkerSample& s) { return s.frame == frame; });
        if (it == samples.end()) {
            missing.push_back(id);
        } else {
            points.emplace_back(it->position_mm.x(), it->position_mm.y());
        }
    }
    if (points.size() < 3) {
        std::string msg = "frame " + std::to_string(frame) + ": only " +
                          std::to_string(points.size()) +
                          " markers visible, need 3; missing:";
        for (const auto& id : missing) msg += " " + id;
        throw InsufficientMarkersError(msg, std::move(missing));
    }
    return fit_circle_2d(points);
}

double sweep_volume(const MarkerTrajectories& trajectories, int frame_lo, int frame_hi) {
    std::vector<Eigen::Vector3d> points;
    for (const auto& [id, samples] : trajectories)
        for (const auto& s : samples)
            if (s.frame >= frame_lo && s.frame <= frame_hi) points.push_back(s.position_mm);
    return hull_volume(convex_hull_3d(points));
}

RepeatabilityReport repeatability_stats(std::span<const TrialSet> trial_sets) {
    if (trial_sets.empty()) throw InsufficientDataError("repeatability: no trial sets");

    RepeatabilityReport report;
    for (const auto& set : trial_sets) {
        if (set.endpoints_mm.size() < 2)
            throw InsufficientDataError(std::string("repeatability: mode '") +
                                        motion_mode_name(set.mode) +
                                        "' has fewer than 2 trials");
        if (report.mean_deviation_mm.count(set.mode))
            throw InsufficientDataError(std::string("repeatability: duplicate mode '") +
                                        motion_mode_name(set.mode) + "'");

        Eigen::Vector3d mean = Eigen::Vector3d::Zero();
        for (const auto& p : set.endpoints_mm) mean += p;
        mean /= static_cast<double>(set.endpoints_mm.size());

        std::vector<double> deviations;
        deviations.reserve(set.endpoints_mm.size());
        double sum = 0.0;
        for (const auto& p : set.endpoints_mm) {
            double d = (p - mean).norm();
            deviations.push_back(d);
            sum += d;
        }
        report.mean_deviation_mm[set.mode] = sum / static_cast<double>(deviations.size());
        report.trial_deviations_mm[set.mode] = std::move(deviations);
    }

    double total = 0.0;
    for (const auto& [mode, value] : report.mean_deviation_mm) total += value;
    report.overall_mean_deviation_mm =
        total / static_cast<double>(report.mean_deviation_mm.size());
    return report;
}

std::vector<TrialSet> load_trials(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty stream, expected header");
    if (strip_cr(line) != kTrialHeader)
        throw ParseError(1, "expected header '" + kTrialHeader + "'");

    std::map<MotionMode, TrialSet> by_mode;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() != 5)
            throw ParseError(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        if (!parse_int(fields[0])) throw ParseError(line_no, "invalid trial index");

        std::string mode_text(trim(fields[1]));
        MotionMode mode;
        if (mode_text == "bending") {
            mode = MotionMode::Bending;
        } else if (mode_text == "twisting") {
            mode = MotionMode::Twisting;
        } else if (mode_text == "extension") {
            mode = MotionMode::Extension;
        } else {
            throw ParseError(line_no, "unknown mode '" + mode_text + "'");
        }

        Eigen::Vector3d p;
        for (int c = 0; c < 3; ++c) {
            auto value = parse_double(fields[2 + c]);
            if (!value || !std::isfinite(*value))
                throw ParseError(line_no, "invalid coordinate");
            p[c] = *value;
        }
        auto& set = by_mode[mode];
        set.mode = mode;
        set.endpoints_mm.push_back(p);
    }

    std::vector<TrialSet> sets;
    for (auto& [mode, set] : by_mode) sets.push_back(std::move(set));
    return sets;
}

}  // namespace twistmodel
