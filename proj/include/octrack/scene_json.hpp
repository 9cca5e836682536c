#pragma once

#include <istream>

#include <json.hpp>

#include "octrack/noise_lab.hpp"

namespace octrack {

/// Reads a scene plan from JSON. Schema:
/// {
///   "frames": 150, "seed": 42,
///   "sigma_u": 0.5, "sigma_v": 0.5, "false_negative_rate": 0.0,
///   "targets": [
///     {"box_w": 40, "box_h": 80,
///      "waypoints": [{"frame": 1, "u": 100, "v": 200}, ...],
///      "sinusoid": {"amplitude": 30, "period": 60, "axis": "v"},   // optional
///      "occlusions": [[40, 50], ...]}                              // optional
///   ]
/// }
inline ScenePlan scene_plan_from_json(std::istream& in) {
    const nlohmann::json j = nlohmann::json::parse(in);
    ScenePlan plan;
    plan.frames = j.at("frames").get<int>();
    plan.seed = j.value("seed", std::uint64_t{0});
    plan.sigma_u = j.value("sigma_u", 0.0);
    plan.sigma_v = j.value("sigma_v", 0.0);
    plan.false_negative_rate = j.value("false_negative_rate", 0.0);
    for (const nlohmann::json& jt : j.at("targets")) {
        TargetPlan target;
        target.box_w = jt.at("box_w").get<double>();
        target.box_h = jt.at("box_h").get<double>();
        for (const nlohmann::json& jw : jt.at("waypoints")) {
            target.waypoints.push_back({jw.at("frame").get<int>(),
                                        jw.at("u").get<double>(),
                                        jw.at("v").get<double>()});
        }
        if (jt.contains("sinusoid")) {
            const nlohmann::json& js = jt.at("sinusoid");
            SinusoidSpec spec;
            spec.amplitude = js.at("amplitude").get<double>();
            spec.period = js.at("period").get<double>();
            spec.axis = js.value("axis", "v") == std::string("u") ? 0 : 1;
            target.sinusoid = spec;
        }
        if (jt.contains("occlusions")) {
            for (const nlohmann::json& jo : jt.at("occlusions")) {
                target.occlusions.push_back(
                    {jo.at(0).get<int>(), jo.at(1).get<int>()});
            }
        }
        plan.targets.push_back(std::move(target));
    }
    plan.validate();
    return plan;
}

}  // namespace octrack
