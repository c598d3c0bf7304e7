#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "qfilter/noise.hpp"

using namespace qfilter;

TEST_CASE("wiener_path is deterministic in its seed") {
    const NoisePath a = wiener_path(0.01, 1000, 3, 99);
    const NoisePath b = wiener_path(0.01, 1000, 3, 99);
    const NoisePath c = wiener_path(0.01, 1000, 3, 100);
    CHECK(a.increments == b.increments);
    CHECK(a.increments != c.increments);
    CHECK(a.kind == NoiseKind::innovation);
    CHECK(a.seed == 99);
    CHECK(a.increments.size() == 3000);
    for (double v : a.increments) CHECK(std::isfinite(v));
}

TEST_CASE("paths generated on concurrent workers are bit-identical to serial ones") {
    std::vector<NoisePath> parallel(8);
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < parallel.size(); ++i)
            pool.emplace_back([&, i] { parallel[i] = wiener_path(1e-3, 5000, 1, derive_seed(7, i)); });
    }
    for (std::size_t i = 0; i < parallel.size(); ++i)
        CHECK(parallel[i].increments == wiener_path(1e-3, 5000, 1, derive_seed(7, i)).increments);
}

TEST_CASE("wiener_path rejects bad shapes") {
    CHECK_THROWS_AS(wiener_path(0.0, 10, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(wiener_path(-1.0, 10, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(wiener_path(0.1, 0, 1, 1), InvalidParameter);
    CHECK_THROWS_AS(wiener_path(0.1, 10, 2, 1), InvalidParameter);
}

TEST_CASE("increment mean and variance") {
    const double dt = 0.01;
    const std::size_t n = 1'000'000;
    const NoisePath path = wiener_path(dt, n, 1, 12345);
    double mean = 0.0;
    for (double v : path.increments) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : path.increments) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(dt / static_cast<double>(n)));
    CHECK(std::abs(var - dt) <= 0.01 * dt);
}

TEST_CASE("components are uncorrelated in three dimensions") {
    const double dt = 0.01;
    const std::size_t n = 200'000;
    const NoisePath path = wiener_path(dt, n, 3, 777);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b) {
            double cov = 0.0;
            for (std::size_t k = 0; k < n; ++k) cov += path.row(k)[a] * path.row(k)[b];
            cov /= static_cast<double>(n);
            CHECK(std::abs(cov) < 4.0 * dt / std::sqrt(static_cast<double>(n)));
        }
}

TEST_CASE("Kolmogorov-Smirnov test against the standard normal at significance 0.001") {
    const double dt = 0.04;
    const std::size_t n = 100'000;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        NoisePath path = wiener_path(dt, n, 1, seed);
        std::vector<double> z = path.increments;
        for (double& v : z) v /= std::sqrt(dt);
        std::sort(z.begin(), z.end());
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double cdf = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
            d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
        }
        // asymptotic critical value c(0.001) = 1.9495
        CHECK(d < 1.9495 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("derive_seed yields distinct streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t base : {0ULL, 1ULL, 42ULL, 43ULL})
        for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(derive_seed(base, i));
    CHECK(seen.size() == 4000);
}

TEST_CASE("innovation_to_output") {
    const PhysParams p2 = make_params(1, 1, 2, 1);
    SUBCASE("hand-evaluated increment") {
        NoisePath path{0.01, 1, 1, {0.1}, NoiseKind::innovation, 0};
        const std::vector<double> q{1.0};
        const NoisePath out = innovation_to_output(path, q, p2);
        CHECK(out.kind == NoiseKind::output);
        CHECK(out.increments[0] == doctest::Approx(0.12).epsilon(1e-14));
    }
    SUBCASE("zero position or zero lambda leaves the record unchanged") {
        const NoisePath path = wiener_path(0.01, 100, 3, 5);
        const std::vector<double> zeros(300, 0.0), ones(300, 1.0);
        CHECK(innovation_to_output(path, zeros, p2).increments == path.increments);
        CHECK(innovation_to_output(path, ones, make_params(1, 1, 0, 3)).increments == path.increments);
    }
    SUBCASE("round trip within 1e-14 per increment") {
        const NoisePath path = wiener_path(0.01, 1000, 1, 6);
        std::vector<double> q(1000);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::sin(0.01 * static_cast<double>(i)) * 3.0;
        const NoisePath back = output_to_innovation(innovation_to_output(path, q, p2), q, p2);
        CHECK(back.kind == NoiseKind::innovation);
        for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(back.increments[i] - path.increments[i]) <= 1e-14);
    }
    SUBCASE("errors") {
        const NoisePath path = wiener_path(0.01, 10, 1, 1);
        CHECK_THROWS_AS(innovation_to_output(path, std::vector<double>(9), p2), ShapeMismatch);
        const NoisePath out = innovation_to_output(path, std::vector<double>(10), p2);
        CHECK_THROWS_AS(innovation_to_output(out, std::vector<double>(10), p2), InvalidParameter);
    }
}

TEST_CASE("CSV dump and restore reproduce the path bit-exactly") {
    const NoisePath path = wiener_path(0.001, 250, 3, 31);
    std::stringstream ss;
    write_noise_csv(ss, path);
    CHECK(ss.str().rfind("step,dQ_1,dQ_2,dQ_3\n", 0) == 0);
    const NoisePath back = read_noise_csv(ss, path.dt, path.kind, path.seed);
    CHECK(back.n_steps == path.n_steps);
    CHECK(back.dim == path.dim);
    CHECK(back.increments == path.increments);

    std::stringstream bad("step,dQ_1\n0,abc\n");
    CHECK_THROWS_AS(read_noise_csv(bad, 0.1, NoiseKind::innovation, 0), ParseError);
}
