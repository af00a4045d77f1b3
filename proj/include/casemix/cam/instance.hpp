// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "casemix/common.hpp"

namespace casemix::cam {

enum class ResourceKind { kOperatingRoom, kWard, kIcu, kOther };

inline std::string_view to_string(ResourceKind k) noexcept {
    switch (k) {
        case ResourceKind::kOperatingRoom: return "operating_room";
        case ResourceKind::kWard: return "ward";
        case ResourceKind::kIcu: return "icu";
        case ResourceKind::kOther: return "other";
    }
    return "other";
}

inline ResourceKind parse_resource_kind(std::string_view s) {
    if (s == "operating_room") return ResourceKind::kOperatingRoom;
    if (s == "ward") return ResourceKind::kWard;
    if (s == "icu") return ResourceKind::kIcu;
    if (s == "other") return ResourceKind::kOther;
    throw InputError("unknown resource kind '" + std::string(s) + "'");
}

struct Resource {
    std::string id;
    ResourceKind kind{ResourceKind::kOther};
    int bed_count{1};          // rooms for theatres, beds for wards and ICU
    double weekly_hours{0.0};  // per bed/room

    /// Time available over the horizon: beds x hours/week x weeks.
    double capacity(double horizon_weeks) const noexcept {
        return static_cast<double>(bed_count) * weekly_hours * horizon_weeks;
    }
};

struct Activity {
    std::string id;
    double duration_hours{0.0};  // per patient
    std::vector<std::string> eligible_resources;
};

struct Subtype {
    std::string id;
    double mix{1.0};  // minimum share of the group's patients
    std::vector<Activity> activities;
};

struct Group {
    std::string id;
    std::vector<Subtype> subtypes;
};

struct HospitalInstance {
    std::vector<Resource> resources;
    std::vector<Group> groups;
    double horizon_weeks{1.0};

    std::size_t group_count() const noexcept { return groups.size(); }

    std::vector<std::string> group_labels() const {
        std::vector<std::string> out;
        out.reserve(groups.size());
        for (const auto& g : groups) out.push_back(g.id);
        return out;
    }

    /// Index of resource `id`, or resources.size() when absent.
    std::size_t find_resource(std::string_view id) const noexcept {
        for (std::size_t i = 0; i < resources.size(); ++i)
            if (resources[i].id == id) return i;
        return resources.size();
    }

    std::size_t find_group(std::string_view id) const noexcept {
        for (std::size_t i = 0; i < groups.size(); ++i)
            if (groups[i].id == id) return i;
        return groups.size();
    }

    /// Structural checks that do not depend on resource references; those are
    /// checked when the model is built.
    void validate() const {
        if (!(horizon_weeks > 0.0) || !std::isfinite(horizon_weeks))
            throw InputError("horizon_weeks must be a positive number");
        std::set<std::string> seen;
        for (const auto& r : resources) {
            if (r.id.empty()) throw InputError("resource with empty id");
            if (!seen.insert(r.id).second) throw InputError("duplicate resource id '" + r.id + "'");
            if (r.bed_count < 1) throw InputError("resource '" + r.id + "' must have at least one bed/room");
            if (!(r.weekly_hours >= 0.0) || !std::isfinite(r.weekly_hours))
                throw InputError("resource '" + r.id + "' has invalid weekly hours");
        }
        seen.clear();
        for (const auto& g : groups) {
            if (g.id.empty()) throw InputError("group with empty id");
            if (!seen.insert(g.id).second) throw InputError("duplicate group id '" + g.id + "'");
            if (g.subtypes.empty()) throw InputError("group '" + g.id + "' has no subtypes");
            double total = 0.0;
            for (const auto& p : g.subtypes) {
                if (!(p.mix >= 0.0) || !std::isfinite(p.mix))
                    throw InputError("group '" + g.id + "' subtype '" + p.id + "' has a negative mix");
                if (p.activities.empty())
                    throw InputError("group '" + g.id + "' subtype '" + p.id + "' has no activities");
                for (const auto& a : p.activities)
                    if (!(a.duration_hours >= 0.0) || !std::isfinite(a.duration_hours))
                        throw InputError("activity '" + a.id + "' has a negative duration");
                total += p.mix;
            }
            if (std::abs(total - 1.0) > 1e-6)
                throw InputError("group '" + g.id + "' subtype mix sums to " + std::to_string(total) + ", not 1");
        }
    }
};

/// Rescales every group's mix to sum to one. Returns the ids of groups that
/// needed it. Groups whose mix sums to zero are left untouched.
inline std::vector<std::string> normalize_mixes(HospitalInstance& instance) {
    std::vector<std::string> changed;
    for (auto& g : instance.groups) {
        double total = 0.0;
        for (const auto& p : g.subtypes) total += p.mix;
        if (total <= 0.0 || std::abs(total - 1.0) <= 1e-6) continue;
        for (auto& p : g.subtypes) p.mix /= total;
        changed.push_back(g.id);
    }
    return changed;
}

}  // namespace casemix::cam
