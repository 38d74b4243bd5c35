#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "ptrac/errors.hpp"
#include "ptrac/rng.hpp"

namespace ptrac {
namespace {

// Published splitmix64 reference (Vigna), kept separate from the library.
struct ReferenceSplitMix {
    std::uint64_t x;
    std::uint64_t next()
    {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
        z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
        return z ^ (z >> 31);
    }
};

TEST(SplitMix64, ReferenceVector)
{
    const auto [v0, s1] = splitmix64_next(0);
    EXPECT_EQ(v0, 0xE220A8397B1DCDAFULL);
    const auto [v1, s2] = splitmix64_next(s1);
    EXPECT_EQ(v1, 0x6E789E6AA1B965F4ULL);
    EXPECT_EQ(splitmix64_next(s2).first, 0x06C45D188009454FULL);

    ReferenceSplitMix ref{0x1234ABCDULL};
    std::uint64_t state = 0x1234ABCDULL;
    for (int i = 0; i < 1000; ++i) {
        const auto [v, next] = splitmix64_next(state);
        ASSERT_EQ(v, ref.next());
        state = next;
    }
}

TEST(SplitMix64, DistinctStreamsAndPurity)
{
    EXPECT_NE(splitmix64_next(1).first, splitmix64_next(0).first);
    EXPECT_EQ(splitmix64_next(77), splitmix64_next(77));
}

TEST(RngSeed, Formula)
{
    static_assert(rng_seed_for(0, 0) == 0);
    EXPECT_EQ(rng_seed_for(0, 1), 83u);
    EXPECT_EQ(rng_seed_for(2, 3), 251u);
    for (std::uint64_t rank = 0; rank <= 10; ++rank) {
        std::set<std::uint64_t> seen;
        for (std::uint64_t d = 0; d < 83; ++d) {
            EXPECT_TRUE(seen.insert(rng_seed_for(rank, d)).second);
        }
    }
}

TEST(RngInit, FaithfulSeedsPerDevice)
{
    Control ctl;
    ctl.rng_mode = RngMode::faithful;
    const auto rng = module_rng_init(ctl, 4);
    EXPECT_EQ(rng.device_gens, (std::vector<std::uint64_t>{0, 83, 166, 249}));
}

TEST(RngInit, CounterKeepsNoDeviceState)
{
    Control ctl;
    ctl.rng_mode = RngMode::counter;
    ctl.rng_seed_global = 5;
    const auto rng = module_rng_init(ctl, 4);
    EXPECT_TRUE(rng.device_gens.empty());
    EXPECT_EQ(rng.seed_global, 5u);
    EXPECT_THROW(module_rng_init(ctl, 0), ArgumentError);
}

TEST(CounterKey, BitFieldsAreDisjoint)
{
    EXPECT_EQ(counter_key(0xFFFFFFFF, 0, RngStream::convection, 0), 0xFFFFFFFFULL);
    EXPECT_EQ(counter_key(0, 0xFFFFFF, RngStream::convection, 0),
              0x00FFFFFF00000000ULL);
    EXPECT_EQ(counter_key(0, 0, RngStream::meso, 3), 0x0B00000000000000ULL);
}

RngState counter_state(std::uint64_t seed)
{
    Control ctl;
    ctl.rng_mode = RngMode::counter;
    ctl.rng_seed_global = seed;
    return module_rng_init(ctl, 1);
}

TEST(GenerateRandomNums, CounterIsDeviceIndependent)
{
    auto rng = counter_state(11);
    RandomBatch a, b;
    a.resize(50);
    b.resize(50);
    generate_random_nums(rng, 3, {0, 0, 50}, 0, a);
    generate_random_nums(rng, 3, {2, 0, 50}, 2, b);
    EXPECT_EQ(a.convection, b.convection);
    EXPECT_EQ(a.diff_turb, b.diff_turb);
    EXPECT_EQ(a.diff_meso, b.diff_meso);
}

TEST(GenerateRandomNums, CounterPartitionConcatenation)
{
    auto rng = counter_state(0xDEADBEEF);
    const std::size_t np = 1001;
    RandomBatch whole, pieces;
    whole.resize(np);
    pieces.resize(np);
    generate_random_nums(rng, 17, full_range(np), 0, whole);
    for (int d = 0; d < 7; ++d) {
        generate_random_nums(rng, 17, calc_device_workload_range(np, 7, d), d,
                             pieces);
    }
    EXPECT_EQ(whole.convection, pieces.convection);
    EXPECT_EQ(whole.diff_turb, pieces.diff_turb);
    EXPECT_EQ(whole.diff_meso, pieces.diff_meso);

    RandomBatch next_step;
    next_step.resize(np);
    generate_random_nums(rng, 18, full_range(np), 0, next_step);
    EXPECT_NE(whole.convection, next_step.convection);
}

TEST(GenerateRandomNums, FaithfulDrawOrder)
{
    Control ctl;
    const auto seed = rng_seed_for(0, 1);
    auto rng = module_rng_init(ctl, 2);
    RandomBatch batch;
    batch.resize(3);
    generate_random_nums(rng, 0, {1, 1, 2}, 1, batch);

    ReferenceSplitMix ref{seed};
    auto u = [&ref] { return static_cast<double>(ref.next() >> 11) * 0x1.0p-53; };
    auto pair = [&](double& c, double& s) {
        const double r = std::sqrt(-2.0 * std::log1p(-u()));
        const double phi = 2.0 * std::numbers::pi * u();
        c = r * std::cos(phi);
        s = r * std::sin(phi);
    };
    const double conv = u();
    double n[6];
    pair(n[0], n[1]);
    pair(n[2], n[3]);
    pair(n[4], n[5]);
    EXPECT_EQ(batch.convection[1], conv);
    EXPECT_EQ(batch.diff_turb[3], n[0]);
    EXPECT_EQ(batch.diff_turb[4], n[1]);
    EXPECT_EQ(batch.diff_turb[5], n[2]);
    EXPECT_EQ(batch.diff_meso[3], n[3]);
    EXPECT_EQ(batch.diff_meso[4], n[4]);
    EXPECT_EQ(batch.diff_meso[5], n[5]);
    // Untouched outside the range.
    EXPECT_EQ(batch.convection[0], 0.0);
    EXPECT_EQ(batch.diff_turb[6], 0.0);
    // Generator advanced by exactly 7 uniforms; device 0 untouched.
    EXPECT_EQ(rng.device_gens[1], ref.x);
    EXPECT_EQ(rng.device_gens[0], 0u);
}

TEST(GenerateRandomNums, FaithfulIsReproducible)
{
    Control ctl;
    ctl.mpi_rank = 3;
    auto a = module_rng_init(ctl, 2);
    auto b = module_rng_init(ctl, 2);
    RandomBatch x, y;
    x.resize(40);
    y.resize(40);
    for (std::uint64_t step = 0; step < 3; ++step) {
        generate_random_nums(a, step, {1, 0, 40}, 1, x);
        generate_random_nums(b, step, {1, 0, 40}, 1, y);
        EXPECT_EQ(x.diff_turb, y.diff_turb);
        EXPECT_EQ(x.convection, y.convection);
    }
}

TEST(GenerateRandomNums, RangeChecks)
{
    auto rng = counter_state(1);
    RandomBatch batch;
    batch.resize(10);
    EXPECT_THROW(generate_random_nums(rng, 0, {0, 5, 11}, 0, batch), BoundsError);
    Control ctl;
    auto faithful = module_rng_init(ctl, 2);
    EXPECT_THROW(generate_random_nums(faithful, 0, {0, 0, 10}, 2, batch),
                 ArgumentError);
}

// 3-sigma Monte-Carlo bounds: mean of 1e6 uniforms has sd 2.9e-4, normal mean
// sd 1e-3, normal variance sd 1.4e-3.
TEST(GenerateRandomNums, CounterDistributionMoments)
{
    auto rng = counter_state(2024);
    const std::size_t np = 1'000'000;
    RandomBatch batch;
    batch.resize(np);
    generate_random_nums(rng, 5, full_range(np), 0, batch);

    double mean_u = 0.0;
    for (const double x : batch.convection) {
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        mean_u += x;
    }
    mean_u /= static_cast<double>(np);
    EXPECT_NEAR(mean_u, 0.5, 0.002);

    for (const auto* v : {&batch.diff_turb, &batch.diff_meso}) {
        // First component of each triple: 1e6 normals.
        double m = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < np; ++i) {
            const double x = (*v)[3 * i];
            ASSERT_TRUE(std::isfinite(x));
            m += x;
            m2 += x * x;
        }
        m /= static_cast<double>(np);
        const double var = m2 / static_cast<double>(np) - m * m;
        EXPECT_NEAR(m, 0.0, 0.004);
        EXPECT_NEAR(var, 1.0, 0.01);
    }
}

} // namespace
} // namespace ptrac
