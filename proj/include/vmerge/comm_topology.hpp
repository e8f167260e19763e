// Unidirectional multi-leader communication topology over the virtual
// sequence. Vehicle j may listen to a downstream vehicle i < j unless a
// vehicle between them blocks the link (complement-edge rule).
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vmerge/virtual_axis.hpp"

namespace vmerge {

/// Directed predecessor graph over sequence indices 1..n. adjacency[i-1][j-1]
/// is 1 iff vehicle j receives from vehicle i (only i < j can be set).
/// predecessor_sets[j-1] lists j's allowed predecessors nearest-first.
struct CommTopology {
    int n = 0;
    std::vector<std::vector<std::uint8_t>> adjacency;
    std::vector<std::vector<int>> predecessor_sets;
};

/// Builds the topology from the mainline/ramp indicator flags.
///
/// Edge (i,j), i<j, is blocked iff either
///   flags_i == flags_j and some k in (i,j) has flags_k == flags_i, or
///   flags_i != flags_j and some k in (i,j) has flags_k == flags_j.
/// Every other downstream pair is connected; the immediate predecessor is
/// always allowed (no k can sit strictly between j-1 and j).
inline CommTopology build_topology(const std::vector<Lane>& flags) {
    if (flags.empty()) throw std::invalid_argument("flags must be nonempty");
    const int n = static_cast<int>(flags.size());
    CommTopology topo;
    topo.n = n;
    topo.adjacency.assign(n, std::vector<std::uint8_t>(n, 0));
    topo.predecessor_sets.assign(n, {});

    for (int j = 2; j <= n; ++j) {
        for (int i = j - 1; i >= 1; --i) {
            const Lane fi = flags[i - 1];
            const Lane fj = flags[j - 1];
            const Lane blocker = (fi == fj) ? fi : fj;
            bool blocked = false;
            for (int k = i + 1; k < j && !blocked; ++k)
                blocked = (flags[k - 1] == blocker);
            if (!blocked) {
                topo.adjacency[i - 1][j - 1] = 1;
                topo.predecessor_sets[j - 1].push_back(i); // nearest-first
            }
        }
    }
    return topo;
}

/// Allowed predecessors of vehicle j (1-based), nearest-first. Empty for the
/// platoon leader.
inline const std::vector<int>& predecessor_set(const CommTopology& topo, int j) {
    if (j < 1 || j > topo.n) throw std::out_of_range("vehicle index out of range");
    return topo.predecessor_sets[j - 1];
}

} // namespace vmerge
