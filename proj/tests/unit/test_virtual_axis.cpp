#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>

#include "vmerge/virtual_axis.hpp"

using namespace vmerge;

namespace {

std::vector<LaneVehicle> lane(const char* prefix, const std::vector<double>& xs, double v = 20.0) {
    std::vector<LaneVehicle> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.push_back({prefix + std::to_string(i + 1), xs[i], v});
    return out;
}

} // namespace

TEST_CASE("pool_union validates lane reports") {
    SECTION("12-vehicle setup is accepted") {
        const auto pool = pool_union(lane("m", {0, -30, -46, -68, -89, -165, -186}),
                                     lane("r", {-20, -109, -132, -154, -198}));
        REQUIRE(pool.size() == 12);
    }
    SECTION("empty mainline is fine") {
        const auto pool = pool_union({}, lane("r", {-5}));
        REQUIRE(pool.size() == 1);
        REQUIRE(pool.ramp[0].position == -5.0);
    }
    SECTION("cross-lane distance ties are allowed") {
        REQUIRE_NOTHROW(pool_union(lane("m", {0}), lane("r", {0})));
    }
    SECTION("duplicate id across lanes is rejected") {
        REQUIRE_THROWS_AS(pool_union({{"a", 0, 20}}, {{"a", -5, 20}}), std::invalid_argument);
    }
    SECTION("equal positions on one lane are rejected") {
        REQUIRE_THROWS_AS(pool_union(lane("m", {0, 0}), {}), std::invalid_argument);
        REQUIRE_THROWS_AS(pool_union(lane("m", {0, -3, -1}), {}), std::invalid_argument);
    }
}

TEST_CASE("sequence sorts by distance to the merge point") {
    SECTION("12-vehicle layout") {
        const auto seq = sequence(pool_union(lane("m", {0, -30, -46, -68, -89, -165, -186}),
                                             lane("r", {-20, -109, -132, -154, -198})));
        const std::vector<double> expect_x = {0,    -20,  -30,  -46,  -68,  -89,
                                              -109, -132, -154, -165, -186, -198};
        const std::vector<int> expect_flags = {1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0};
        REQUIRE(seq.positions == expect_x);
        for (std::size_t i = 0; i < seq.size(); ++i)
            REQUIRE(static_cast<int>(seq.flags[i]) == expect_flags[i]);
        REQUIRE(seq.seq_ids.front() == 1);
        REQUIRE(seq.seq_ids.back() == 12);
    }
    SECTION("4-vehicle layout") {
        const auto seq = sequence(pool_union(lane("m", {0, -8}), lane("r", {-2, -9})));
        REQUIRE(seq.positions == std::vector<double>{0, -2, -8, -9});
        const std::vector<int> expect_flags = {1, 0, 1, 0};
        for (std::size_t i = 0; i < seq.size(); ++i)
            REQUIRE(static_cast<int>(seq.flags[i]) == expect_flags[i]);
    }
    SECTION("single vehicle maps to itself") {
        const auto seq = sequence(pool_union({}, lane("r", {-7})));
        REQUIRE(seq.size() == 1);
        REQUIRE(seq.source_ids[0] == "r1");
    }
    SECTION("cross-lane tie goes to the mainline vehicle") {
        const auto seq = sequence(pool_union(lane("m", {-5}), lane("r", {-5})));
        REQUIRE(seq.flags[0] == Lane::Mainline);
        REQUIRE(seq.flags[1] == Lane::Ramp);
    }
}

TEST_CASE("sequence is a permutation preserving per-lane order") {
    std::mt19937_64 gen(20260809);
    auto uniform = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int nm = static_cast<int>(uniform(0, 6.99));
        const int nr = static_cast<int>(uniform(0, 6.99));
        if (nm + nr == 0) continue;
        std::vector<double> xm, xr;
        double x = 0;
        for (int i = 0; i < nm; ++i) xm.push_back(x -= uniform(0.5, 30));
        x = uniform(-3, 3);
        for (int i = 0; i < nr; ++i) xr.push_back(x -= uniform(0.5, 30));
        const auto pool = pool_union(lane("m", xm, 18), lane("r", xr, 22));
        const auto seq = sequence(pool);

        // Permutation: the multiset of (id, position, speed) is unchanged.
        std::multimap<std::string, std::pair<double, double>> in, out;
        for (const auto* l : {&pool.mainline, &pool.ramp})
            for (const auto& v : *l) in.insert({v.id, {v.position, v.speed}});
        for (std::size_t i = 0; i < seq.size(); ++i)
            out.insert({seq.source_ids[i], {seq.positions[i], seq.speeds[i]}});
        REQUIRE(in == out);

        // Strictly decreasing positions after the tie-break.
        for (std::size_t i = 1; i < seq.size(); ++i)
            REQUIRE(seq.positions[i - 1] >= seq.positions[i]);

        // Per-lane relative order preserved.
        std::vector<std::string> got_m, got_r;
        for (std::size_t i = 0; i < seq.size(); ++i)
            (seq.flags[i] == Lane::Mainline ? got_m : got_r).push_back(seq.source_ids[i]);
        std::vector<std::string> want_m, want_r;
        for (const auto& v : pool.mainline) want_m.push_back(v.id);
        for (const auto& v : pool.ramp) want_r.push_back(v.id);
        REQUIRE(got_m == want_m);
        REQUIRE(got_r == want_r);
    }
}

TEST_CASE("resequence keeps the FIFO lock") {
    SECTION("small position overshoot does not reorder") {
        const auto prev = sequence(pool_union(lane("m", {0}), lane("r", {-0.5})));
        REQUIRE(prev.source_ids == std::vector<std::string>{"m1", "r1"});
        // r1 has nosed 0.4 m ahead of m1; the assigned order stands.
        const auto reseq = resequence(prev, pool_union({{"m1", 10.0, 20}}, {{"r1", 10.4, 20}}));
        REQUIRE(reseq.source_ids == std::vector<std::string>{"m1", "r1"});
        REQUIRE(reseq.positions == std::vector<double>{10.0, 10.4});
    }
    SECTION("new arrival behind the platoon joins the tail") {
        const auto prev = sequence(pool_union(lane("m", {0, -25}), {}));
        const auto reseq = resequence(
            prev, pool_union({{"m1", 0, 20}, {"m2", -25, 20}}, {{"r1", -35, 20}}));
        REQUIRE(reseq.source_ids == std::vector<std::string>{"m1", "m2", "r1"});
    }
    SECTION("empty previous sequence bootstraps to sequence()") {
        const auto pool = pool_union(lane("m", {0, -8}), lane("r", {-2, -9}));
        const auto reseq = resequence(VirtualSequence{}, pool);
        const auto direct = sequence(pool);
        REQUIRE(reseq.source_ids == direct.source_ids);
        REQUIRE(reseq.positions == direct.positions);
    }
    SECTION("vehicle disappearing without an exit event is an error") {
        const auto prev = sequence(pool_union(lane("m", {0, -25}), {}));
        REQUIRE_THROWS_AS(resequence(prev, pool_union({{"m1", 0, 20}}, {})),
                          std::invalid_argument);
    }
    SECTION("mid-platoon arrival lands after everyone ahead of it") {
        const auto prev = sequence(pool_union(lane("m", {0, -40}), {}));
        const auto reseq = resequence(
            prev, pool_union({{"m1", 0, 20}, {"m2", -40, 20}}, {{"r1", -20, 20}}));
        REQUIRE(reseq.source_ids == std::vector<std::string>{"m1", "r1", "m2"});
    }
    SECTION("repeated resequence with an unchanged pool is idempotent") {
        const auto pool = pool_union(lane("m", {0, -30, -46}), lane("r", {-20, -55}));
        const auto once = resequence(sequence(pool), pool);
        const auto twice = resequence(once, pool);
        REQUIRE(once.source_ids == twice.source_ids);
        REQUIRE(once.positions == twice.positions);
        REQUIRE(once.seq_ids == twice.seq_ids);
    }
}
