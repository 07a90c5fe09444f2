// Honest, cheating and leaking boxes in the Magic-Square key distribution
// protocol, followed by a small key-rate table.

#include <cstdio>

#include "dptkit/diqkd.hpp"

int main() {
    using namespace dptkit;
    ProtocolParams p;
    p.n = 400;
    p.alpha = 0.5;
    p.gamma = 0.25;
    p.delta = 0.05;
    p.c = 0.4;
    const std::size_t runs = 2000;
    const auto script = AdversaryScript::test_set_cheater(p.leakage_limit());

    std::size_t honest = 0, cheat = 0, leak = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        p.seed = derive_seed(1, r);
        HonestBoxes h(p.delta);
        CheatingBoxes c1, c2;
        honest += !run_protocol(p, h).aborted;
        cheat += !run_protocol(p, c1).aborted;
        leak += !run_protocol(p, c2, &script).aborted;
    }
    std::printf("pass rate over %zu runs (n=%zu, |T|=%zu, budget %zu bits)\n", runs, p.n, p.t_size(),
                p.leakage_limit());
    std::printf("  honest boxes, delta=%.2f        %.4f\n", p.delta, double(honest) / runs);
    std::printf("  classical cheating boxes        %.4f\n", double(cheat) / runs);
    std::printf("  cheating boxes + input leakage  %.4f\n", double(leak) / runs);

    std::printf("\nrate per copy, nu=0.3 beta=0.5 delta=0.001 gamma=0.001 n=1e6\n   c \\ alpha");
    const double alphas[] = {0.005, 0.01, 0.02, 0.04};
    for (double a : alphas) std::printf("%12.3f", a);
    std::printf("\n");
    for (double c : {0.0, 0.001, 0.01, 0.05}) {
        std::printf("%12.3f", c);
        for (double a : alphas)
            std::printf("%12.6f", key_rate({a, 0.001, 0.001, c, 0.3, 0.5, 1.0, 1e6}).rate_per_copy);
        std::printf("\n");
    }
}
