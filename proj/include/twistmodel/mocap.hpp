#pragma once

#include <Eigen/Dense>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "twistmodel/actuator.hpp"
#include "twistmodel/circle_fit.hpp"
#include "twistmodel/errors.hpp"

namespace twistmodel {

struct MarkerSample {
    int frame = 0;
    double time_s = 0.0;
    std::string marker_id;
    Eigen::Vector3d position_mm{0.0, 0.0, 0.0};
    std::string config;  // optional grouping label; empty when absent
};

/// Per-marker sample sequences, sorted by frame.
using MarkerTrajectories = std::map<std::string, std::vector<MarkerSample>>;

/// Reads marker CSV with header `frame,time_s,marker_id,x_mm,y_mm,z_mm`
/// (optionally with a trailing `config` column). Throws ParseError with the
/// offending line number on malformed rows and DuplicateSampleError on a
/// repeated (frame, marker_id).
MarkerTrajectories load_trajectories(std::istream& in);

/// Canonical serialization: rows sorted by (marker_id, frame), shortest
/// round-trip number formatting. load -> save is a fixpoint.
void save_trajectories(std::ostream& out, const MarkerTrajectories& trajectories);

/// Frame of a marker's largest displacement from its first sample; the
/// endpoint convention for repeatability trials.
int max_displacement_frame(const std::vector<MarkerSample>& samples);

/// Frame carrying the most visible non-reference markers (ties break to
/// the lowest frame). Throws DegenerateInputError when no usable samples
/// exist.
int best_circle_frame(const MarkerTrajectories& trajectories,
                      const std::set<std::string>& reference_ids);

/// Experimental twist radius at one frame: non-reference marker positions
/// are projected onto the x-y plane and a circle is fitted. Throws
/// InsufficientMarkersError (naming occluded ids) when fewer than 3
/// non-reference markers are visible.
Circle2D experimental_twist_radius(const MarkerTrajectories& trajectories, int frame,
                                   const std::set<std::string>& reference_ids);

/// Volume (mm^3) of the convex hull of every marker position over frames
/// in [frame_lo, frame_hi].
double sweep_volume(const MarkerTrajectories& trajectories, int frame_lo, int frame_hi);

/// Per-trial endpoints of one motion mode.
struct TrialSet {
    MotionMode mode = MotionMode::Bending;
    std::vector<Eigen::Vector3d> endpoints_mm;
};

struct RepeatabilityReport {
    std::map<MotionMode, double> mean_deviation_mm;
    std::map<MotionMode, std::vector<double>> trial_deviations_mm;
    double overall_mean_deviation_mm = 0.0;  // mean of the per-mode values
};

/// Deviation of a trial is its Euclidean distance from the mean endpoint of
/// its mode; per-mode value is the mean deviation. Throws
/// InsufficientDataError when a set has fewer than 2 trials.
RepeatabilityReport repeatability_stats(std::span<const TrialSet> trial_sets);

/// Reads trial CSV with header `trial,mode,x_mm,y_mm,z_mm`; modes are
/// exactly bending|twisting|extension. Returns one TrialSet per mode
/// present, in enum order.
std::vector<TrialSet> load_trials(std::istream& in);

}  // namespace twistmodel
