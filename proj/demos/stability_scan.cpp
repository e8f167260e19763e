// Prints H-infinity norms and the closed-form margins over a small gain scan.

#include <cstdio>

#include "vmerge/stability_analysis.hpp"

int main() {
    using namespace vmerge;
    std::printf("%-10s %8s %8s %4s %12s %10s %10s\n", "scheme", "omega_e", "omega_v", "N",
                "max||Q_k||", "margin", "verdict");
    for (WeightScheme scheme : {WeightScheme::Equal, WeightScheme::Geometric}) {
        for (double we : {0.4, 1.0, 1.4, 2.0}) {
            for (int n : {1, 3, 6}) {
                const auto rep = analyze_gains(scheme, we, 0.3, 1.0, n);
                double worst = 0.0;
                for (const auto& h : rep.per_rank) worst = std::max(worst, h.value);
                std::printf("%-10s %8.2f %8.2f %4d %12.6f %10.4f %10s\n",
                            scheme == WeightScheme::Equal ? "equal" : "geometric", we, 0.3, n,
                            worst, rep.closed_form.margin,
                            rep.closed_form.holds ? "stable" : "unstable");
            }
        }
    }
    return 0;
}
