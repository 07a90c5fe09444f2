#include <gtest/gtest.h>

#include <cmath>

#include "dptkit/entropy.hpp"
#include "dptkit/random.hpp"

using namespace dptkit;

namespace {

DensityOperator ket(std::size_t dim, std::size_t k) { return DensityOperator(PureState::basis(dim, k)); }
DensityOperator ket_plus() { return DensityOperator(PureState::normalized({1.0, 1.0})); }

DensityOperator random_state(Rng& rng, std::size_t dim, std::size_t rank = 0) {
    return DensityOperator(random_density_matrix(rng, dim, rank));
}

// Oracle for the smoothed classical Dmax: scan P' = (1-t, t) over a fine grid.
double grid_smoothed_dmax_2(double p0, double q0, double eps) {
    double best = INFINITY;
    const int steps = 200000;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        if (std::abs(p0 - (1 - t)) + std::abs((1 - p0) - t) > eps + 1e-12) continue;
        const double r = std::max((1 - t) / q0, t / (1 - q0));
        best = std::min(best, std::max(0.0, std::log2(r)));
    }
    return best;
}

// Oracle for H0 smoothing: try every subset of cells to delete.
double exhaustive_h0(const JointTable& t, double eps) {
    const std::size_t cells = t.ny() * t.nz();
    double best = INFINITY;
    for (std::size_t mask = 0; mask < (std::size_t{1} << cells); ++mask) {
        double removed = 0.0;
        bool any_left = false;
        for (std::size_t i = 0; i < cells; ++i) {
            if (mask >> i & 1)
                removed += t.cells()[i];
            else if (t.cells()[i] > 0)
                any_left = true;
        }
        if (!any_left || 2 * removed > eps + 1e-12) continue;
        std::size_t widest = 0;
        for (std::size_t z = 0; z < t.nz(); ++z) {
            std::size_t count = 0;
            for (std::size_t y = 0; y < t.ny(); ++y) {
                const std::size_t i = y * t.nz() + z;
                if (!(mask >> i & 1) && t.cells()[i] > 0) ++count;
            }
            widest = std::max(widest, count);
        }
        best = std::min(best, std::log2(static_cast<double>(widest)));
    }
    return best;
}

} // namespace

TEST(ExtendedReal, OrderingAndValueAccess) {
    const auto inf = ExtendedReal::infinity();
    const auto one = ExtendedReal::finite(1.0);
    EXPECT_TRUE(one < inf);
    EXPECT_TRUE(inf == ExtendedReal::infinity());
    EXPECT_FALSE(inf < inf);
    EXPECT_THROW(inf.value(), DomainError);
    EXPECT_DOUBLE_EQ(one.value(), 1.0);
}

TEST(VonNeumann, Examples) {
    EXPECT_NEAR(vn_entropy(ket_plus()), 0.0, 1e-12);
    EXPECT_NEAR(vn_entropy(DensityOperator::maximally_mixed(2)), 1.0, 1e-12);
    EXPECT_NEAR(vn_entropy(DensityOperator::maximally_mixed(5)), std::log2(5.0), 1e-12);
}

TEST(RelativeEntropy, Examples) {
    Rng rng(1);
    const auto rho = random_state(rng, 3);
    EXPECT_NEAR(rel_entropy(rho, rho).value(), 0.0, 1e-9);
    EXPECT_NEAR(rel_entropy(ket(2, 0), DensityOperator::maximally_mixed(2)).value(), 1.0, 1e-12);
    EXPECT_TRUE(rel_entropy(ket(2, 0), ket(2, 1)).is_infinite());
}

TEST(Dmax, Examples) {
    Rng rng(2);
    const auto rho = random_state(rng, 3);
    EXPECT_NEAR(dmax(rho, rho).value(), 0.0, 1e-9);
    EXPECT_NEAR(dmax(ket(2, 0), DensityOperator::maximally_mixed(2)).value(), 1.0, 1e-12);
    EXPECT_TRUE(dmax(ket(2, 0), ket(2, 1)).is_infinite());
}

TEST(Dmax, MixtureIsDominated) {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 4);
        const auto rho = random_state(rng, d, 1 + uniform_index(rng, d));
        const auto other = random_state(rng, d, 1 + uniform_index(rng, d));
        EXPECT_LE(dmax(rho, mix(0.25, rho, other)).value(), 2.0 + 1e-8);
    }
}

TEST(SmoothedDmaxClassical, Examples) {
    const ClassicalDistribution p({1.0, 0.0});
    const ClassicalDistribution q({0.5, 0.5});
    EXPECT_NEAR(smoothed_dmax_classical(p, q, 0.5).value(), std::log2(1.5), 1e-12);
    EXPECT_NEAR(smoothed_dmax_classical(p, q, 0.5).value(), grid_smoothed_dmax_2(1.0, 0.5, 0.5), 1e-5);
    EXPECT_NEAR(smoothed_dmax_classical(p, q, 0.0).value(), dmax(p, q).value(), 1e-12);
    for (double eps : {0.0, 0.2, 0.9}) EXPECT_NEAR(smoothed_dmax_classical(q, q, eps).value(), 0.0, 1e-12);
}

TEST(SmoothedDmaxClassical, InfiniteOnlyWhenStrandedMassExceedsBudget) {
    const ClassicalDistribution p({0.9, 0.1});
    const ClassicalDistribution q({1.0, 0.0});
    EXPECT_TRUE(smoothed_dmax_classical(p, q, 0.1).is_infinite());
    EXPECT_NEAR(smoothed_dmax_classical(p, q, 0.2).value(), 0.0, 1e-12);
}

TEST(SmoothedDmaxClassical, MatchesGridOracleOnTwoOutcomes) {
    Rng rng(4);
    for (int trial = 0; trial < 40; ++trial) {
        const double p0 = uniform01(rng);
        const double q0 = 0.05 + 0.9 * uniform01(rng);
        const double eps = 0.9 * uniform01(rng);
        const double got =
            smoothed_dmax_classical(ClassicalDistribution({p0, 1 - p0}), ClassicalDistribution({q0, 1 - q0}), eps)
                .value();
        EXPECT_NEAR(got, grid_smoothed_dmax_2(p0, q0, eps), 1e-4) << p0 << " " << q0 << " " << eps;
    }
}

TEST(CondHmin, ClassicalExamples) {
    // Uniform X independent of Z: every column is flat.
    const JointTable independent(4, 2, std::vector<double>(8, 1.0 / 8));
    EXPECT_NEAR(cond_hmin(independent), 2.0, 1e-12);
    // X copied into Z.
    const JointTable copied(3, 3, {1.0 / 3, 0, 0, 0, 1.0 / 3, 0, 0, 0, 1.0 / 3});
    EXPECT_NEAR(cond_hmin(copied), 0.0, 1e-12);
}

TEST(CondHmin, QuantumExamples) {
    const double helstrom = 0.5 * (1 + 1 / std::sqrt(2.0));
    EXPECT_NEAR(cond_hmin(CQState({0.5, 0.5}, {ket(2, 0), ket_plus()})), -std::log2(helstrom), 1e-10);

    const auto mixed = DensityOperator::maximally_mixed(2);
    EXPECT_NEAR(cond_hmin(CQState({0.25, 0.25, 0.25, 0.25}, {mixed, mixed, mixed, mixed})), 2.0, 1e-10);
    // Commuting conditional states on three symbols: reduces to the classical table.
    const auto cq = CQState({0.5, 0.3, 0.2}, {ket(3, 0), ket(3, 1), DensityOperator::maximally_mixed(3)});
    const JointTable table(3, 3, {0.5, 0, 0, 0, 0.3, 0, 0.2 / 3, 0.2 / 3, 0.2 / 3});
    EXPECT_NEAR(cond_hmin(cq), cond_hmin(table), 1e-10);
}

TEST(CondHmin, NonCommutingManySymbolsIsRejected) {
    const auto minus = DensityOperator(PureState::normalized({1.0, -1.0}));
    EXPECT_THROW(cond_hmin(CQState({0.4, 0.3, 0.3}, {ket(2, 0), ket_plus(), minus})), CapabilityError);
}

TEST(CondH0, Examples) {
    const JointTable function_of_z(2, 2, {0.5, 0, 0, 0.5});
    EXPECT_NEAR(cond_h0(function_of_z), 0.0, 1e-12);
    const JointTable independent(3, 2, std::vector<double>(6, 1.0 / 6));
    EXPECT_NEAR(cond_h0(independent), std::log2(3.0), 1e-12);

    const JointTable corner(2, 2, {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0});
    EXPECT_NEAR(cond_h0(corner, 0.0), 1.0, 1e-12);
    EXPECT_NEAR(cond_h0(corner, 0.67), 1.0, 1e-12);
}

TEST(CondH0, GreedyUpperBoundsExhaustiveOracle) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t ny = 1 + uniform_index(rng, 3);
        const std::size_t nz = 1 + uniform_index(rng, 8 / ny);
        auto cells = random_distribution(rng, ny * nz);
        const double eps = uniform01(rng);
        const JointTable t(ny, nz, cells);
        EXPECT_GE(cond_h0(t, eps), exhaustive_h0(t, eps) - 1e-12);
        EXPECT_NEAR(cond_h0(t, 0.0), exhaustive_h0(t, 0.0), 1e-12);
    }
}

TEST(BinaryEntropy, Examples) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.5), 1.0, 1e-15);
    // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated independently.
    EXPECT_NEAR(binary_entropy(0.11), 0.499915958164528, 1e-12);
    EXPECT_THROW(binary_entropy(1.5), DomainError);
    EXPECT_THROW(binary_entropy(-0.1), DomainError);
}

// Properties

TEST(Properties, RelativeEntropyBelowDmax) {
    Rng rng(200);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 5);
        const auto rho = random_state(rng, d, 1 + uniform_index(rng, d));
        const auto sigma = random_state(rng, d);
        const double rel = rel_entropy(rho, sigma).value();
        EXPECT_GE(rel, -1e-8);
        EXPECT_LE(rel, dmax(rho, sigma).value() + 1e-8);
    }
}

TEST(Properties, Pinsker) {
    Rng rng(201);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 5);
        const auto rho = random_state(rng, d, 1 + uniform_index(rng, d));
        const auto sigma = random_state(rng, d);
        const double t = trace_distance(rho, sigma);
        const double rel = rel_entropy(rho, sigma).value();
        EXPECT_LE(t * t, 2.0 * std::log(2.0) * rel + 1e-8);
        EXPECT_LE(1.0 - fidelity(rho, sigma), std::log(2.0) * rel + 1e-8);
    }
}

TEST(Properties, UnitaryInvariance) {
    Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 2 + uniform_index(rng, 5);
        const auto rho = random_state(rng, d, 1 + uniform_index(rng, d));
        const auto sigma = random_state(rng, d);
        const auto u = random_unitary(rng, d);
        EXPECT_NEAR(rel_entropy(rho, sigma).value(),
                    rel_entropy(rho.conjugated(u), sigma.conjugated(u)).value(), 1e-8);
        EXPECT_NEAR(dmax(rho, sigma).value(), dmax(rho.conjugated(u), sigma.conjugated(u)).value(), 1e-8);
    }
}

TEST(Properties, ChainRuleForMinEntropy) {
    Rng rng(203);
    for (int trial = 0; trial < 300; ++trial) {
        // Joint P(y, x, z) with |X| = 2; Z-side register is (x, z) or z alone.
        const std::size_t ny = 2 + uniform_index(rng, 2);
        const std::size_t nx = 2;
        const std::size_t nz = 1 + uniform_index(rng, 3);
        const auto p = random_distribution(rng, ny * nx * nz);
        auto at = [&](std::size_t y, std::size_t x, std::size_t z) { return p[(y * nx + x) * nz + z]; };

        std::vector<double> y_given_z(ny * nz, 0.0), y_given_xz(ny * nx * nz, 0.0), yx_given_z(ny * nx * nz, 0.0);
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t z = 0; z < nz; ++z) {
                    y_given_z[y * nz + z] += at(y, x, z);
                    y_given_xz[y * nx * nz + x * nz + z] = at(y, x, z);
                    yx_given_z[(y * nx + x) * nz + z] = at(y, x, z);
                }
        const double h_y_z = cond_hmin(JointTable(ny, nz, y_given_z));
        const double h_y_xz = cond_hmin(JointTable(ny, nx * nz, y_given_xz));
        const double h_yx_z = cond_hmin(JointTable(ny * nx, nz, yx_given_z));
        EXPECT_GE(h_y_z, h_y_xz - 1e-12);
        EXPECT_GE(h_y_xz, h_yx_z - std::log2(static_cast<double>(nx)) - 1e-12);
    }
}

TEST(Properties, ClassicalSubstateBound) {
    Rng rng(204);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t k = 2 + uniform_index(rng, 7);
        const ClassicalDistribution p(random_distribution(rng, k));
        const ClassicalDistribution q(random_distribution(rng, k));
        const double rel = rel_entropy(p, q).value();
        for (double eps : {0.1, 0.3, 0.5}) {
            const double bound = (4 * rel + 1) / (eps * eps) + std::log2(1 / (1 - eps * eps / 4));
            EXPECT_LE(smoothed_dmax_classical(p, q, eps).value(), bound);
        }
    }
}
