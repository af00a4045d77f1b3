// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Hospital instance files (JSON, schema "casemix-instance/1").
//
//   {
//     "schema": "casemix-instance/1",
//     "horizon_weeks": 52,
//     "defaults": {"ward_hours": 168, "icu_hours": 168, "operating_room_hours": 40},
//     "resources": [{"id": "3C", "kind": "ward", "beds": 28}, ...],
//     "groups": [{
//       "id": "CARD",
//       "published_upper_bound": 2420.72,          (optional, informational)
//       "subtypes": [
//         {"id": "surgical", "mix": 58.2, "ot_hours": 3.16, "icu_hours": 19.85,
//          "ward_hours": 171.85, "wards": ["3C"]},
//         {"id": "medical", "mix": 41.2, "activities": [
//            {"id": "theatre", "hours": 0.06, "resources": ["OT"]}, ...]}
//       ]}]
//   }
//
// A subtype gives either explicit "activities" or the (ot, icu, ward) hours
// triple; the triple expands to a theatre activity on every operating room, an
// ICU activity on every ICU and a ward activity on the listed wards, each only
// when its hours are positive. Mixes summing to 100 are read as percentages;
// other sums are rescaled with a warning unless "normalize_mix" is false.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casemix/cam/instance.hpp"
#include "casemix/common.hpp"

namespace casemix::io {

inline constexpr const char* kInstanceSchema = "casemix-instance/1";

struct InstanceDefaults {
    double ward_hours{168.0};
    double icu_hours{168.0};
    double operating_room_hours{40.0};
    double other_hours{0.0};
};

struct LoadedInstance {
    cam::HospitalInstance instance;
    std::vector<std::optional<double>> published_upper_bounds;  // per group
    std::vector<std::string> warnings;
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
    throw FormatError(where + ": " + what);
}

inline const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error(where, "expected a finite number");
    return d;
}

inline double optional_number(const json& obj, const char* key, double fallback, const std::string& where) {
    const auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, where + "." + key);
}

inline std::string text(const json& v, const std::string& where) {
    if (!v.is_string()) schema_error(where, "expected a string");
    return v.get<std::string>();
}

inline std::vector<std::string> string_list(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(text(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline std::vector<std::string> ids_of_kind(const cam::HospitalInstance& h, cam::ResourceKind kind) {
    std::vector<std::string> out;
    for (const auto& r : h.resources)
        if (r.kind == kind) out.push_back(r.id);
    return out;
}

}  // namespace detail

/// Parses and validates an instance document. Unknown resource references
/// raise InputError; structural problems raise FormatError naming the field.
inline LoadedInstance parse_instance(const std::string& content) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("instance: ") + e.what());
    }
    LoadedInstance out;
    auto& inst = out.instance;

    const std::string schema = detail::text(detail::require(doc, "schema", "instance"), "instance.schema");
    if (schema != kInstanceSchema)
        detail::schema_error("instance.schema", "unsupported schema '" + schema + "' (expected " + kInstanceSchema + ")");
    inst.horizon_weeks = detail::number(detail::require(doc, "horizon_weeks", "instance"), "instance.horizon_weeks");
    const bool normalize = doc.value("normalize_mix", true);

    InstanceDefaults defaults;
    if (const auto it = doc.find("defaults"); it != doc.end()) {
        defaults.ward_hours = detail::optional_number(*it, "ward_hours", defaults.ward_hours, "instance.defaults");
        defaults.icu_hours = detail::optional_number(*it, "icu_hours", defaults.icu_hours, "instance.defaults");
        defaults.operating_room_hours =
            detail::optional_number(*it, "operating_room_hours", defaults.operating_room_hours, "instance.defaults");
        defaults.other_hours = detail::optional_number(*it, "other_hours", defaults.other_hours, "instance.defaults");
    }

    const auto& resources = detail::require(doc, "resources", "instance");
    if (!resources.is_array()) detail::schema_error("instance.resources", "expected an array");
    for (std::size_t i = 0; i < resources.size(); ++i) {
        const std::string where = "instance.resources[" + std::to_string(i) + "]";
        const auto& r = resources[i];
        cam::Resource res;
        res.id = detail::text(detail::require(r, "id", where), where + ".id");
        try {
            res.kind = cam::parse_resource_kind(detail::text(detail::require(r, "kind", where), where + ".kind"));
        } catch (const InputError& e) {
            detail::schema_error(where + ".kind", e.what());
        }
        const double beds = detail::optional_number(r, "beds", 1.0, where);
        if (beds < 1.0 || beds != std::floor(beds)) detail::schema_error(where + ".beds", "expected a positive integer");
        res.bed_count = static_cast<int>(beds);
        const double fallback = res.kind == cam::ResourceKind::kWard            ? defaults.ward_hours
                                : res.kind == cam::ResourceKind::kIcu           ? defaults.icu_hours
                                : res.kind == cam::ResourceKind::kOperatingRoom ? defaults.operating_room_hours
                                                                                : defaults.other_hours;
        res.weekly_hours = detail::optional_number(r, "weekly_hours", fallback, where);
        inst.resources.push_back(std::move(res));
    }

    const auto theatres = detail::ids_of_kind(inst, cam::ResourceKind::kOperatingRoom);
    const auto icus = detail::ids_of_kind(inst, cam::ResourceKind::kIcu);

    const auto& groups = detail::require(doc, "groups", "instance");
    if (!groups.is_array()) detail::schema_error("instance.groups", "expected an array");
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const std::string where = "instance.groups[" + std::to_string(gi) + "]";
        const auto& g = groups[gi];
        cam::Group grp;
        grp.id = detail::text(detail::require(g, "id", where), where + ".id");
        std::optional<double> published;
        if (const auto it = g.find("published_upper_bound"); it != g.end())
            published = detail::number(*it, where + ".published_upper_bound");
        const auto& subtypes = detail::require(g, "subtypes", where);
        if (!subtypes.is_array()) detail::schema_error(where + ".subtypes", "expected an array");

        std::vector<std::size_t> needs_wards;  // subtypes with ward hours but no ward list
        for (std::size_t pi = 0; pi < subtypes.size(); ++pi) {
            const std::string sw = where + ".subtypes[" + std::to_string(pi) + "]";
            const auto& s = subtypes[pi];
            cam::Subtype sub;
            sub.id = detail::text(detail::require(s, "id", sw), sw + ".id");
            sub.mix = detail::number(detail::require(s, "mix", sw), sw + ".mix");
            if (const auto it = s.find("activities"); it != s.end()) {
                if (!it->is_array()) detail::schema_error(sw + ".activities", "expected an array");
                for (std::size_t ai = 0; ai < it->size(); ++ai) {
                    const std::string aw = sw + ".activities[" + std::to_string(ai) + "]";
                    const auto& a = (*it)[ai];
                    sub.activities.push_back({detail::text(detail::require(a, "id", aw), aw + ".id"),
                                              detail::number(detail::require(a, "hours", aw), aw + ".hours"),
                                              detail::string_list(detail::require(a, "resources", aw), aw + ".resources")});
                }
            } else {
                const double ot = detail::optional_number(s, "ot_hours", 0.0, sw);
                const double icu = detail::optional_number(s, "icu_hours", 0.0, sw);
                const double ward = detail::optional_number(s, "ward_hours", 0.0, sw);
                std::vector<std::string> wards;
                if (const auto it = s.find("wards"); it != s.end()) wards = detail::string_list(*it, sw + ".wards");
                if (ot > 0.0) sub.activities.push_back({"theatre", ot, theatres});
                if (icu > 0.0) sub.activities.push_back({"icu", icu, icus});
                if (ward > 0.0) {
                    if (wards.empty()) needs_wards.push_back(grp.subtypes.size());
                    sub.activities.push_back({"ward", ward, std::move(wards)});
                }
            }
            grp.subtypes.push_back(std::move(sub));
        }
        for (std::size_t p : needs_wards) {
            std::vector<std::string> pool;
            for (std::size_t q = 0; q < grp.subtypes.size(); ++q) {
                if (q == p) continue;
                for (const auto& a : grp.subtypes[q].activities)
                    if (a.id == "ward")
                        for (const auto& w : a.eligible_resources)
                            if (std::find(pool.begin(), pool.end(), w) == pool.end()) pool.push_back(w);
            }
            if (pool.empty()) continue;  // left empty: build_cam reports it
            for (auto& a : grp.subtypes[p].activities)
                if (a.id == "ward" && a.eligible_resources.empty()) a.eligible_resources = pool;
            out.warnings.push_back("group " + grp.id + " subtype " + grp.subtypes[p].id +
                                   " lists no ward; using the group's other wards");
        }

        double total = 0.0;
        for (const auto& s : grp.subtypes) total += s.mix;
        if (std::abs(total - 100.0) <= 1e-6) {
            for (auto& s : grp.subtypes) s.mix /= 100.0;
        } else if (std::abs(total - 1.0) > 1e-6 && normalize && total > 0.0) {
            const bool percent = total > 2.0;
            for (auto& s : grp.subtypes) s.mix /= total;
            std::ostringstream msg;
            msg << "group " << grp.id << " mix sums to " << total << (percent ? "%" : "") << "; rescaled to 1";
            out.warnings.push_back(msg.str());
        }
        inst.groups.push_back(std::move(grp));
        out.published_upper_bounds.push_back(published);
    }

    inst.validate();
    for (const auto& g : inst.groups)
        for (const auto& s : g.subtypes)
            for (const auto& a : s.activities)
                for (const auto& r : a.eligible_resources)
                    if (inst.find_resource(r) == inst.resources.size())
                        throw InputError("group " + g.id + " subtype " + s.id + " activity " + a.id +
                                         " references unknown resource '" + r + "'");
    return out;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline LoadedInstance load_instance(const std::string& path) { return parse_instance(read_text_file(path)); }

/// Writes the explicit-activity form, so synthesized activities and
/// normalized mixes survive a round trip unchanged.
inline std::string serialize_instance(const cam::HospitalInstance& inst,
                                      const std::vector<std::optional<double>>& published = {}) {
    using detail::json;
    json doc;
    doc["schema"] = kInstanceSchema;
    doc["horizon_weeks"] = inst.horizon_weeks;
    doc["normalize_mix"] = false;
    doc["resources"] = json::array();
    for (const auto& r : inst.resources)
        doc["resources"].push_back(
            {{"id", r.id}, {"kind", std::string(cam::to_string(r.kind))}, {"beds", r.bed_count}, {"weekly_hours", r.weekly_hours}});
    doc["groups"] = json::array();
    for (std::size_t g = 0; g < inst.groups.size(); ++g) {
        const auto& grp = inst.groups[g];
        json jg{{"id", grp.id}, {"subtypes", json::array()}};
        if (g < published.size() && published[g]) jg["published_upper_bound"] = *published[g];
        for (const auto& s : grp.subtypes) {
            json js{{"id", s.id}, {"mix", s.mix}, {"activities", json::array()}};
            for (const auto& a : s.activities)
                js["activities"].push_back({{"id", a.id}, {"hours", a.duration_hours}, {"resources", a.eligible_resources}});
            jg["subtypes"].push_back(std::move(js));
        }
        doc["groups"].push_back(std::move(jg));
    }
    return doc.dump(2) + "\n";
}

inline void save_instance(const cam::HospitalInstance& inst, const std::string& path,
                          const std::vector<std::optional<double>>& published = {}) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << serialize_instance(inst, published);
    if (!out) throw FormatError("write to '" + path + "' failed");
}

}  // namespace casemix::io
