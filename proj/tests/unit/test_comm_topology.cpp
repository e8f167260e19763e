#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "vmerge/comm_topology.hpp"

using namespace vmerge;

namespace {

std::vector<Lane> to_flags(const std::vector<int>& bits) {
    std::vector<Lane> flags;
    for (int b : bits) flags.push_back(b ? Lane::Mainline : Lane::Ramp);
    return flags;
}

// Literal restatement of the complement-edge rule, used as the oracle.
bool edge_allowed_brute(const std::vector<int>& f, int i, int j) {
    const bool same = f[i - 1] == f[j - 1];
    const int blocker = same ? f[i - 1] : f[j - 1];
    for (int k = i + 1; k < j; ++k)
        if (f[k - 1] == blocker) return false;
    return true;
}

// Closed-form characterization: the nearest same-lane predecessor plus every
// opposite-lane vehicle behind it; all predecessors if none share the lane.
std::vector<int> preds_closed_form(const std::vector<int>& f, int j) {
    int nearest_same = 0;
    for (int i = j - 1; i >= 1; --i)
        if (f[i - 1] == f[j - 1]) {
            nearest_same = i;
            break;
        }
    std::vector<int> out;
    for (int i = j - 1; i >= 1; --i) {
        if (i == nearest_same) out.push_back(i);
        else if (i > nearest_same && f[i - 1] != f[j - 1]) out.push_back(i);
        else if (nearest_same == 0) out.push_back(i);
    }
    return out;
}

} // namespace

TEST_CASE("five-vehicle example topology") {
    const auto topo = build_topology(to_flags({0, 1, 1, 0, 1}));
    REQUIRE(predecessor_set(topo, 4) == std::vector<int>{3, 2, 1});
    REQUIRE(predecessor_set(topo, 5) == std::vector<int>{4, 3});
    REQUIRE(predecessor_set(topo, 1).empty());
    REQUIRE(predecessor_set(topo, 2) == std::vector<int>{1});
}

TEST_CASE("single-lane flags reduce to the immediate-predecessor chain") {
    const auto topo = build_topology(to_flags({1, 1, 1, 1, 1, 1}));
    for (int j = 2; j <= 6; ++j) REQUIRE(predecessor_set(topo, j) == std::vector<int>{j - 1});
}

TEST_CASE("12-vehicle layout predecessors") {
    const auto topo = build_topology(to_flags({1, 0, 1, 1, 1, 1, 0, 0, 0, 1, 1, 0}));
    REQUIRE(predecessor_set(topo, 10) == std::vector<int>{9, 8, 7, 6});
}

TEST_CASE("predecessor_set bounds") {
    const auto topo = build_topology(to_flags({1, 0}));
    REQUIRE_THROWS_AS(predecessor_set(topo, 0), std::out_of_range);
    REQUIRE_THROWS_AS(predecessor_set(topo, 3), std::out_of_range);
    REQUIRE_THROWS_AS(build_topology({}), std::invalid_argument);
}

TEST_CASE("closed form matches the rule on every flag vector up to n=10") {
    for (int n = 1; n <= 10; ++n) {
        for (int mask = 0; mask < (1 << n); ++mask) {
            std::vector<int> f(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) f[static_cast<std::size_t>(i)] = (mask >> i) & 1;
            const auto topo = build_topology(to_flags(f));
            for (int j = 1; j <= n; ++j) {
                std::vector<int> brute;
                for (int i = j - 1; i >= 1; --i)
                    if (edge_allowed_brute(f, i, j)) brute.push_back(i);
                REQUIRE(predecessor_set(topo, j) == brute);
                REQUIRE(preds_closed_form(f, j) == brute);
            }
            // DAG by construction: adjacency is strictly upper-triangular in
            // (i, j) with i < j.
            for (int i = 1; i <= n; ++i)
                for (int j = 1; j <= i; ++j) REQUIRE(topo.adjacency[i - 1][j - 1] == 0);
        }
    }
}

TEST_CASE("removing a vehicle never introduces a same-lane skip") {
    const std::vector<int> f0 = {1, 0, 1, 1, 0, 1, 0, 0, 1, 0};
    for (std::size_t removed = 0; removed < f0.size(); ++removed) {
        std::vector<int> f = f0;
        f.erase(f.begin() + static_cast<std::ptrdiff_t>(removed));
        const auto topo = build_topology(to_flags(f));
        const int n = static_cast<int>(f.size());
        for (int j = 1; j <= n; ++j)
            for (int i : predecessor_set(topo, j)) {
                for (int k = i + 1; k < j; ++k)
                    REQUIRE(f[static_cast<std::size_t>(k - 1)] !=
                            f[static_cast<std::size_t>(j - 1)]);
                (void)i;
            }
    }
}
