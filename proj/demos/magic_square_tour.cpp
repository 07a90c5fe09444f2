// Values of the Magic Square game under different resources.

#include <cstdio>

#include "dptkit/games.hpp"
#include "dptkit/partition_bound.hpp"
#include "dptkit/probe.hpp"

int main() {
    using namespace dptkit;
    const auto g = magic_square();

    std::printf("classical value          %.15f\n", classical_value(g).value);
    std::printf("Mermin-Peres strategy    %.15f\n", evaluate_quantum_strategy(g, canonical_ms_strategy()));
    std::printf("no-signalling value      %.15f\n", ns_game_value(g).value);

    for (double eps : {0.0, 0.1}) {
        const auto ns = eff_ns(g, eps, EffVariant::average);
        const auto loc = eff_local(g, eps, EffVariant::average);
        std::printf("eff (average, eps=%.1f)   ns %.12f   local %.12f\n", eps, ns.eff, loc.eff);
    }

    for (std::size_t bits : {0u, 1u, 2u}) {
        RepetitionProbe p;
        p.comm_bits = bits;
        std::printf("one copy, %zu broadcast bit(s): %.15f\n", bits, empirical_repeated_value(g, p).best_value);
    }
    RepetitionProbe two;
    two.n = 2;
    std::printf("two copies, no communication (hill climb): %.15f  vs (8/9)^2 = %.15f\n",
                empirical_repeated_value(g, two).best_value, 64.0 / 81.0);
}
