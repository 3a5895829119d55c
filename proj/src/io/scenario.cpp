// SPDX-License-Identifier: Apache-2.0

#include "lifi/io/scenario.hpp"

#include <fstream>

#include <json.hpp>

#include "lifi/io/atomic_file.hpp"

namespace lifi::io {

using nlohmann::json;
using channel::LedConfig;
using channel::NlosParams;
using channel::PdConfig;
using channel::ScenarioConfig;
using geometry::Vec3;

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& arr, const std::string& what) {
    if (!arr.is_array() || arr.size() != 3) {
        throw Error(Errc::parse, "scenario: '" + what + "' must be a 3-element array");
    }
    return Vec3(arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>());
}

} // namespace

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::missing_file, "cannot open scenario file: " + path);
    json obj;
    try {
        in >> obj;
    } catch (const json::exception& e) {
        throw Error(Errc::parse, "scenario " + path + ": " + e.what());
    }

    ScenarioConfig sc;
    try {
        if (obj.contains("room")) sc.room = vec3_from_json(obj.at("room").at("size"), "room.size");
        if (obj.contains("ue_reference")) {
            sc.ue_reference = vec3_from_json(obj.at("ue_reference"), "ue_reference");
        }
        sc.leds.clear();
        for (const auto& led_json : obj.at("leds")) {
            LedConfig led;
            led.id = led_json.value("id", "led");
            led.u_l = vec3_from_json(led_json.at("position"), "led position");
            if (led_json.contains("normal")) {
                led.n_l = vec3_from_json(led_json.at("normal"), "led normal");
            }
            led.lambertian_order = led_json.value("lambertian_order", 1.0);
            sc.leds.push_back(led);
        }
        sc.pds.clear();
        for (const auto& pd_json : obj.at("pds")) {
            PdConfig pd;
            pd.id = pd_json.value("id", "pd");
            pd.u_p0 = vec3_from_json(pd_json.at("position"), "pd position");
            pd.n_p0 = vec3_from_json(pd_json.at("normal"), "pd normal");
            pd.area = pd_json.value("area_m2", 1e-4);
            pd.concentrator_gain = pd_json.value("concentrator_gain", 1.0);
            pd.fov = deg2rad(pd_json.value("fov_deg", 60.0));
            sc.pds.push_back(pd);
        }
        if (obj.contains("nlos")) {
            const auto& nl = obj.at("nlos");
            sc.nlos.enabled = nl.value("enabled", false);
            sc.nlos.rho = nl.value("rho", 0.5);
            sc.nlos.surface_area = nl.value("surface_area_m2", 1e-4);
            sc.nlos.cutoff_hz = nl.value("cutoff_hz", 1e7);
            sc.nlos.delay = nl.value("delay_s", 0.0);
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse, "scenario " + path + ": " + e.what());
    }

    try {
        sc.validate();
    } catch (const std::exception& e) {
        throw Error(Errc::config, "scenario " + path + ": " + e.what());
    }
    return sc;
}

void save_scenario(const std::string& path, const ScenarioConfig& scenario) {
    json obj;
    obj["room"] = {{"size", vec3_to_json(scenario.room)}};
    obj["ue_reference"] = vec3_to_json(scenario.ue_reference);
    obj["leds"] = json::array();
    for (const auto& led : scenario.leds) {
        obj["leds"].push_back({{"id", led.id},
                               {"position", vec3_to_json(led.u_l)},
                               {"normal", vec3_to_json(led.n_l)},
                               {"lambertian_order", led.lambertian_order}});
    }
    obj["pds"] = json::array();
    for (const auto& pd : scenario.pds) {
        obj["pds"].push_back({{"id", pd.id},
                              {"position", vec3_to_json(pd.u_p0)},
                              {"normal", vec3_to_json(pd.n_p0)},
                              {"area_m2", pd.area},
                              {"concentrator_gain", pd.concentrator_gain},
                              {"fov_deg", rad2deg(pd.fov)}});
    }
    obj["nlos"] = {{"enabled", scenario.nlos.enabled},
                   {"rho", scenario.nlos.rho},
                   {"surface_area_m2", scenario.nlos.surface_area},
                   {"cutoff_hz", scenario.nlos.cutoff_hz},
                   {"delay_s", scenario.nlos.delay}};
    atomic_write(path, obj.dump(2) + "\n");
}

ScenarioConfig default_scenario() {
    ScenarioConfig sc;
    sc.room = Vec3(4.0, 4.0, 3.0);
    sc.ue_reference = Vec3(0.0, 0.0, 1.0);

    LedConfig led;
    led.id = "led1";
    led.u_l = Vec3(0.0, 0.0, 3.0);
    sc.leds = {led};

    PdConfig pd1;
    pd1.id = "pd1";
    pd1.u_p0 = Vec3(0.0, 0.0, 1.0);
    pd1.n_p0 = Vec3(0.0, 0.0, 1.0);

    PdConfig pd2;
    pd2.id = "pd2";
    pd2.u_p0 = Vec3(0.05, 0.0, 1.0);
    pd2.n_p0 = Vec3(0.0, 1.0, 0.0);

    sc.pds = {pd1, pd2};
    return sc;
}

} // namespace lifi::io
