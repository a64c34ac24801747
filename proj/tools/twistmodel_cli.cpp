#include <CLI11.hpp>
#include <fmt/core.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twistmodel/actuator.hpp"
#include "twistmodel/config.hpp"
#include "twistmodel/mocap.hpp"
#include "twistmodel/svg.hpp"
#include "twistmodel/text.hpp"

namespace tm = twistmodel;
namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 usage/config error, 2 data/solver error.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CommandOutcome {
    int exit_code = kExitOk;
    std::vector<std::string> artifacts;
    std::vector<std::string> summary;
};

struct CommonOptions {
    std::string config_path = "actuator.ini";
    bool config_explicit = false;
};

// Default config path is optional scaffolding: when the file is absent the
// built-in defaults apply. An explicitly requested file must exist.
tm::ActuatorConfig resolve_config(const CommonOptions& opts) {
    if (!opts.config_explicit && !fs::exists(opts.config_path)) return tm::default_config();
    return tm::load_config(opts.config_path);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw tm::ConfigError("cannot write output file: " + path);
    return out;
}

tm::MarkerTrajectories load_marker_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tm::ConfigError("cannot open marker file: " + path);
    return tm::load_trajectories(in);
}

CommandOutcome cmd_predict_twist(const CommonOptions& common, double pmin, double pmax,
                                 double step, bool parallel, const std::string& out_path,
                                 const std::string& plot_path) {
    if (!(step > 0.0)) throw tm::ConfigError("--step must be positive");
    if (!(pmin >= 0.0)) throw tm::ConfigError("--pmin must be >= 0");
    if (pmin > pmax) throw tm::ConfigError("--pmin must not exceed --pmax");

    const tm::ActuatorConfig cfg = resolve_config(common);
    std::vector<double> pressures;
    const int count = static_cast<int>(std::floor((pmax - pmin) / step + 1e-9)) + 1;
    pressures.reserve(count);
    for (int i = 0; i < count; ++i) pressures.push_back(pmin + i * step);

    const tm::TwistCurve curve = tm::predict_twist_curve(
        cfg.geometry, cfg.material, pressures,
        parallel ? tm::SweepMode::ParallelColdStart : tm::SweepMode::Continuation);

    CommandOutcome outcome;
    {
        auto out = open_output(out_path);
        out << "pressure_kpa,twist_radius_mm,residual,pre_loop\n";
        for (const auto& s : curve.samples) {
            out << tm::format_double(s.pressure_kpa) << ','
                << (s.twist_radius_mm ? tm::format_double(*s.twist_radius_mm) : "") << ','
                << tm::format_double(s.gradient_residual) << ','
                << (s.pre_loop ? "true" : "false") << "\n";
        }
    }
    outcome.artifacts.push_back(out_path);

    if (!plot_path.empty()) {
        tm::PlotSeries series;
        for (const auto& s : curve.samples)
            if (s.twist_radius_mm) series.points.emplace_back(s.pressure_kpa, *s.twist_radius_mm);
        tm::write_line_chart(plot_path, "Predicted twist radius vs pressure", "pressure [kPa]",
                             "twist radius [mm]", {series});
        outcome.artifacts.push_back(plot_path);
    }

    int failures = 0;
    bool monotone = true;
    std::optional<double> prev_radius;
    for (const auto& s : curve.samples) {
        if (!s.converged) ++failures;
        if (s.twist_radius_mm) {
            if (prev_radius && *s.twist_radius_mm > *prev_radius) monotone = false;
            prev_radius = s.twist_radius_mm;
        }
    }
    outcome.summary.push_back(fmt::format("wrote {} samples to {}", curve.samples.size(),
                                          out_path));
    outcome.summary.push_back(fmt::format("radius monotone nonincreasing: {}",
                                          monotone ? "yes" : "no"));
    if (failures > 0) {
        outcome.summary.push_back(fmt::format("{} samples failed to converge", failures));
        outcome.exit_code = kExitData;
    }
    return outcome;
}

CommandOutcome cmd_fit_circle(const std::string& markers_path, std::optional<int> frame,
                              bool best_frame, const std::vector<std::string>& reference,
                              const std::string& out_path) {
    if (frame.has_value() == best_frame)
        throw tm::ConfigError("give exactly one of --frame or --best-frame");

    const tm::MarkerTrajectories trajectories = load_marker_file(markers_path);
    const std::set<std::string> reference_ids(reference.begin(), reference.end());
    const int target =
        best_frame ? tm::best_circle_frame(trajectories, reference_ids) : *frame;

    int used = 0;
    for (const auto& [id, samples] : trajectories) {
        if (reference_ids.count(id)) continue;
        for (const auto& s : samples)
            if (s.frame == target) ++used;
    }
    const tm::Circle2D circle =
        tm::experimental_twist_radius(trajectories, target, reference_ids);

    CommandOutcome outcome;
    {
        auto out = open_output(out_path);
        out << "frame,radius_mm,center_x_mm,center_y_mm,rms_mm,markers_used\n";
        out << target << ',' << tm::format_double(circle.radius) << ','
            << tm::format_double(circle.center.x()) << ','
            << tm::format_double(circle.center.y()) << ','
            << tm::format_double(circle.rms_residual) << ',' << used << "\n";
    }
    outcome.artifacts.push_back(out_path);
    outcome.summary.push_back(fmt::format("frame {}: radius {} mm from {} markers (rms {} mm)",
                                          target, circle.radius, used, circle.rms_residual));
    return outcome;
}

CommandOutcome cmd_sweep_volume(const std::string& markers_path, const std::string& out_path,
                                const std::string& plot_path) {
    const tm::MarkerTrajectories trajectories = load_marker_file(markers_path);

    int frame_lo = std::numeric_limits<int>::max();
    int frame_hi = std::numeric_limits<int>::min();
    std::set<std::string> configs;
    for (const auto& [id, samples] : trajectories) {
        for (const auto& s : samples) {
            frame_lo = std::min(frame_lo, s.frame);
            frame_hi = std::max(frame_hi, s.frame);
            if (!s.config.empty()) configs.insert(s.config);
        }
    }
    if (frame_lo > frame_hi) throw tm::DegenerateInputError("marker file has no samples");

    const double total = tm::sweep_volume(trajectories, frame_lo, frame_hi);

    CommandOutcome outcome;
    {
        auto out = open_output(out_path);
        out << "config,volume_mm3\n";
        out << "total," << tm::format_double(total) << "\n";
        for (const auto& cfg : configs) {
            tm::MarkerTrajectories subset;
            for (const auto& [id, samples] : trajectories)
                for (const auto& s : samples)
                    if (s.config == cfg) subset[id].push_back(s);
            out << cfg << ',' << tm::format_double(tm::sweep_volume(subset, frame_lo, frame_hi))
                << "\n";
        }
    }
    outcome.artifacts.push_back(out_path);

    if (!plot_path.empty()) {
        tm::PlotSeries series;
        for (const auto& [id, samples] : trajectories)
            for (const auto& s : samples)
                series.points.emplace_back(s.position_mm.x(), s.position_mm.y());
        tm::write_scatter_chart(plot_path, "Marker cloud (top view)", "x [mm]", "y [mm]",
                                {series});
        outcome.artifacts.push_back(plot_path);
    }
    outcome.summary.push_back(fmt::format("swept volume over frames {}..{}: {} mm^3", frame_lo,
                                          frame_hi, total));
    return outcome;
}

CommandOutcome cmd_repeatability(const std::string& trials_path, const std::string& out_path) {
    std::ifstream in(trials_path);
    if (!in) throw tm::ConfigError("cannot open trials file: " + trials_path);
    const std::vector<tm::TrialSet> sets = tm::load_trials(in);
    const tm::RepeatabilityReport report = tm::repeatability_stats(sets);

    CommandOutcome outcome;
    {
        auto out = open_output(out_path);
        out << "mode,mean_deviation_mm,trials\n";
        for (const auto& set : sets) {
            out << tm::motion_mode_name(set.mode) << ','
                << tm::format_double(report.mean_deviation_mm.at(set.mode)) << ','
                << set.endpoints_mm.size() << "\n";
        }
        size_t total_trials = 0;
        for (const auto& set : sets) total_trials += set.endpoints_mm.size();
        out << "overall," << tm::format_double(report.overall_mean_deviation_mm) << ','
            << total_trials << "\n";
    }
    outcome.artifacts.push_back(out_path);
    outcome.summary.push_back(fmt::format("overall mean deviation: {} mm over {} modes",
                                          report.overall_mean_deviation_mm, sets.size()));
    return outcome;
}

CommandOutcome cmd_mode(double humofit1_c, double humofit2_c) {
    const tm::MotionMode mode = tm::motion_mode(humofit1_c, humofit2_c);
    CommandOutcome outcome;
    outcome.summary.push_back(tm::motion_mode_name(mode));
    return outcome;
}

int finish(const CommandOutcome& outcome) {
    for (const auto& line : outcome.summary) std::cout << line << "\n";
    return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pressure-to-twist model and motion-capture analysis for a "
                 "fiber-reinforced soft actuator"};
    app.require_subcommand(1);

    CommonOptions common;

    auto* predict = app.add_subcommand("predict-twist",
                                       "Predict the twist radius over a pressure sweep");
    double pmin = 18.0, pmax = 30.0, step = 1.0;
    bool parallel = false;
    std::string predict_out, predict_plot;
    auto* config_opt =
        predict->add_option("--config", common.config_path, "actuator config file (INI)");
    predict->add_option("--pmin", pmin, "lowest pressure [kPa]");
    predict->add_option("--pmax", pmax, "highest pressure [kPa]");
    predict->add_option("--step", step, "pressure increment [kPa]");
    predict->add_flag("--parallel", parallel, "cold-start samples in parallel");
    predict->add_option("--out", predict_out, "output CSV path")->required();
    predict->add_option("--plot", predict_plot, "optional SVG chart path");

    auto* fit = app.add_subcommand("fit-circle", "Fit a circle to marker positions at a frame");
    std::string fit_markers, fit_out;
    int fit_frame = 0;
    bool fit_best = false;
    std::vector<std::string> fit_reference;
    fit->add_option("markers", fit_markers, "marker CSV file")->required();
    auto* frame_opt = fit->add_option("--frame", fit_frame, "frame to fit");
    fit->add_flag("--best-frame", fit_best, "use the frame with the most visible markers");
    fit->add_option("--reference", fit_reference,
                    "reference marker ids to exclude (comma separated)")
        ->delimiter(',');
    fit->add_option("--out", fit_out, "output CSV path")->required();

    auto* sweep = app.add_subcommand("sweep-volume",
                                     "Convex-hull volume of the traced marker cloud");
    std::string sweep_markers, sweep_out, sweep_plot;
    sweep->add_option("markers", sweep_markers, "marker CSV file")->required();
    sweep->add_option("--out", sweep_out, "output CSV path")->required();
    sweep->add_option("--plot", sweep_plot, "optional SVG scatter path");

    auto* repeat = app.add_subcommand("repeatability", "Per-mode endpoint deviation statistics");
    std::string repeat_trials, repeat_out;
    repeat->add_option("trials", repeat_trials, "trial CSV file")->required();
    repeat->add_option("--out", repeat_out, "output CSV path")->required();

    auto* mode_cmd = app.add_subcommand("mode", "Motion mode for element temperatures");
    double humofit1 = 0.0, humofit2 = 0.0;
    mode_cmd->add_option("--humofit1", humofit1, "Humofit1 temperature [C]")->required();
    mode_cmd->add_option("--humofit2", humofit2, "Humofit2 temperature [C]")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    common.config_explicit = config_opt->count() > 0;

    try {
        if (predict->parsed())
            return finish(cmd_predict_twist(common, pmin, pmax, step, parallel, predict_out,
                                            predict_plot));
        if (fit->parsed()) {
            std::optional<int> frame;
            if (frame_opt->count() > 0) frame = fit_frame;
            return finish(cmd_fit_circle(fit_markers, frame, fit_best, fit_reference, fit_out));
        }
        if (sweep->parsed()) return finish(cmd_sweep_volume(sweep_markers, sweep_out, sweep_plot));
        if (repeat->parsed()) return finish(cmd_repeatability(repeat_trials, repeat_out));
        if (mode_cmd->parsed()) return finish(cmd_mode(humofit1, humofit2));
    } catch (const tm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const tm::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
