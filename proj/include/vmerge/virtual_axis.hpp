// Virtual rotation: projects mainline and on-ramp vehicles onto a shared
// axis by distance to the merge point and derives the FIFO following order.
#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace vmerge {

enum class Lane : int { Ramp = 0, Mainline = 1 };

inline char lane_letter(Lane l) { return l == Lane::Mainline ? 'M' : 'R'; }

/// One vehicle as reported by its lane. `position` is the signed distance
/// to the merge point O (negative upstream of O).
struct LaneVehicle {
    std::string id;
    double position = 0.0;
    double speed = 0.0;
};

/// Per-lane vehicle lists, leader first (positions strictly decreasing).
struct LanePool {
    std::vector<LaneVehicle> mainline;
    std::vector<LaneVehicle> ramp;

    std::size_t size() const { return mainline.size() + ramp.size(); }
};

/// The sorted virtual platoon. Entry i is the (i+1)-th vehicle in the
/// following order; seq_ids holds 1..n for convenience.
struct VirtualSequence {
    std::vector<double> positions;
    std::vector<double> speeds;
    std::vector<int> seq_ids;
    std::vector<Lane> flags;
    std::vector<std::string> source_ids;

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }
};

namespace detail {

inline void check_lane(const std::vector<LaneVehicle>& lane, const char* name) {
    for (std::size_t i = 1; i < lane.size(); ++i) {
        if (!(lane[i].position < lane[i - 1].position))
            throw std::invalid_argument(
                std::string(name) + " lane positions must be strictly decreasing (vehicle '" +
                lane[i].id + "')");
    }
}

} // namespace detail

/// Combines the two lane reports into one pool. Rejects duplicate ids and
/// equal positions within one lane; cross-lane position ties are legal.
inline LanePool pool_union(std::vector<LaneVehicle> mainline, std::vector<LaneVehicle> ramp) {
    detail::check_lane(mainline, "mainline");
    detail::check_lane(ramp, "ramp");
    std::unordered_set<std::string> ids;
    for (const auto* lane : {&mainline, &ramp})
        for (const auto& v : *lane)
            if (!ids.insert(v.id).second)
                throw std::invalid_argument("duplicate vehicle id '" + v.id + "'");
    return LanePool{std::move(mainline), std::move(ramp)};
}

/// Sorts the pool onto the virtual axis, closest to the merge point first.
/// A cross-lane distance tie is resolved in favour of the mainline vehicle.
inline VirtualSequence sequence(const LanePool& pool) {
    struct Entry {
        const LaneVehicle* v;
        Lane lane;
    };
    std::vector<Entry> entries;
    entries.reserve(pool.size());
    for (const auto& v : pool.mainline) entries.push_back({&v, Lane::Mainline});
    for (const auto& v : pool.ramp) entries.push_back({&v, Lane::Ramp});

    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.v->position != b.v->position) return a.v->position > b.v->position;
        return static_cast<int>(a.lane) > static_cast<int>(b.lane); // mainline wins ties
    });

    VirtualSequence seq;
    seq.positions.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        seq.positions.push_back(entries[i].v->position);
        seq.speeds.push_back(entries[i].v->speed);
        seq.seq_ids.push_back(static_cast<int>(i) + 1);
        seq.flags.push_back(entries[i].lane);
        seq.source_ids.push_back(entries[i].v->id);
    }
    return seq;
}

/// Re-runs sequencing while keeping the relative order of already-sequenced
/// vehicles fixed (FIFO lock). A new arrival is inserted after the last
/// vehicle currently at or ahead of its position; in normal traffic that is
/// the tail. Every previously sequenced id must still be present.
inline VirtualSequence resequence(const VirtualSequence& prev, const LanePool& pool) {
    if (prev.empty()) return sequence(pool);

    struct Entry {
        const LaneVehicle* v;
        Lane lane;
    };
    std::unordered_map<std::string, Entry> by_id;
    for (const auto& v : pool.mainline) by_id.emplace(v.id, Entry{&v, Lane::Mainline});
    for (const auto& v : pool.ramp) by_id.emplace(v.id, Entry{&v, Lane::Ramp});
    if (by_id.size() != pool.size())
        throw std::invalid_argument("duplicate vehicle id in pool");

    std::vector<Entry> ordered;
    ordered.reserve(pool.size());
    std::unordered_set<std::string> locked;
    for (const auto& id : prev.source_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw std::invalid_argument("vehicle '" + id + "' left the pool without an exit event");
        ordered.push_back(it->second);
        locked.insert(id);
    }

    std::vector<Entry> arrivals;
    for (const auto& [id, e] : by_id)
        if (!locked.count(id)) arrivals.push_back(e);
    std::sort(arrivals.begin(), arrivals.end(), [](const Entry& a, const Entry& b) {
        if (a.v->position != b.v->position) return a.v->position > b.v->position;
        return static_cast<int>(a.lane) > static_cast<int>(b.lane);
    });
    for (const auto& e : arrivals) {
        std::size_t idx = 0;
        for (std::size_t i = 0; i < ordered.size(); ++i)
            if (ordered[i].v->position >= e.v->position) idx = i + 1;
        ordered.insert(ordered.begin() + static_cast<std::ptrdiff_t>(idx), e);
    }

    VirtualSequence seq;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        seq.positions.push_back(ordered[i].v->position);
        seq.speeds.push_back(ordered[i].v->speed);
        seq.seq_ids.push_back(static_cast<int>(i) + 1);
        seq.flags.push_back(ordered[i].lane);
        seq.source_ids.push_back(ordered[i].v->id);
    }
    return seq;
}

} // namespace vmerge
