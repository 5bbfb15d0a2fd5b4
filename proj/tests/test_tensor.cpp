#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fwm/rng.hpp"
#include "fwm/tensor.hpp"

using namespace fwm;

TEST_CASE("seeded tensors are deterministic and seed-sensitive") {
    const FeatureTensor a = seeded_random_tensor(1, 2, 2, 7);
    const FeatureTensor b = seeded_random_tensor(1, 2, 2, 7);
    CHECK(a.data == b.data);

    const FeatureTensor c = seeded_random_tensor(1, 2, 2, 8);
    CHECK(a.data != c.data);
}

TEST_CASE("seeded tensor entries respect the scale bound") {
    const FeatureTensor t = seeded_random_tensor(2, 4, 4, 3, 0.5);
    for (double v : t.data) {
        CHECK(std::abs(v) <= 0.5);
        CHECK(std::isfinite(v));
    }
}

TEST_CASE("zero extents are rejected") {
    CHECK_THROWS_AS(FeatureTensor(0, 2, 2), shape_error);
    CHECK_THROWS_AS(FeatureTensor(1, 0, 2), shape_error);
    CHECK_THROWS_AS(seeded_random_tensor(1, 2, 0, 1), shape_error);
    CHECK_THROWS_AS(FilterBank(0, 1, 3), shape_error);
    CHECK_THROWS_AS(seeded_random_tensor(1, 2, 2, 1, 0.0), config_error);
}

TEST_CASE("l2 norm basics") {
    OutputMap zero(3, 3);
    CHECK(l2_norm(zero) == 0.0);

    OutputMap single(1, 1);
    single.at(0, 0) = 3.0;
    CHECK(l2_norm(single) == doctest::Approx(3.0));

    const std::vector<double> v{3.0, 4.0};
    CHECK(l2_norm(std::span<const double>(v)) == doctest::Approx(5.0));
}

TEST_CASE("l2 norm is absolutely homogeneous") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        FeatureTensor t = seeded_random_tensor(2, 3, 5, 50 + trial);
        const double base = l2_norm(t);
        const double a = rng.symmetric(10.0);
        FeatureTensor scaled = t;
        for (double& x : scaled.data) x *= a;
        CHECK(l2_norm(scaled) == doctest::Approx(std::abs(a) * base).epsilon(1e-12));
    }
}

TEST_CASE("complex cosine on hand-checked vectors") {
    // z1 = z2 = (1, i): identical direction
    const std::vector<double> re{1.0, 0.0}, im{0.0, 1.0};
    CHECK(complex_cosine(re, im, re, im) == doctest::Approx(1.0));

    // z2 = -z1: opposite direction
    const std::vector<double> nre{-1.0, 0.0}, nim{0.0, -1.0};
    CHECK(complex_cosine(re, im, nre, nim) == doctest::Approx(-1.0));

    // z1 = (1, 0), z2 = (i, 0): Re(conj(z1) . z2) = Re(i) = 0
    const std::vector<double> r1{1.0, 0.0}, i1{0.0, 0.0};
    const std::vector<double> r2{0.0, 0.0}, i2{1.0, 0.0};
    CHECK(complex_cosine(r1, i1, r2, i2) == doctest::Approx(0.0));
}

TEST_CASE("complex cosine rejects zero vectors") {
    const std::vector<double> z{0.0, 0.0}, w{1.0, 2.0};
    CHECK_THROWS_AS(complex_cosine(z, z, w, w), numeric_error);
    CHECK_THROWS_AS(complex_cosine(w, w, z, z), numeric_error);
}

TEST_CASE("complex cosine properties: scale invariance, symmetry, range") {
    Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.index(6));
        std::vector<double> r1(n), i1(n), r2(n), i2(n);
        for (int j = 0; j < n; ++j) {
            r1[j] = rng.symmetric(2.0);
            i1[j] = rng.symmetric(2.0);
            r2[j] = rng.symmetric(2.0);
            i2[j] = rng.symmetric(2.0);
        }
        const double c = complex_cosine(r1, i1, r2, i2);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);
        CHECK(c == doctest::Approx(complex_cosine(r2, i2, r1, i1)));

        const double a = 0.01 + 10.0 * rng.unit();
        std::vector<double> sr = r1, si = i1;
        for (double& x : sr) x *= a;
        for (double& x : si) x *= a;
        CHECK(complex_cosine(r1, i1, sr, si) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("filter bank norm covers weights only") {
    FilterBank bank(1, 1, 2);
    bank.weights = {3.0, 0.0, 0.0, 4.0};
    bank.biases = {100.0};
    CHECK(l2_norm(bank) == doctest::Approx(5.0));
}
