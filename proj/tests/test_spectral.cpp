#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "fwm/rng.hpp"
#include "fwm/spectral.hpp"

using namespace fwm;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs_diff(const FeatureTensor& a, const FeatureTensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

// Independent enumeration oracles for the frequency sets, straight from the
// set definitions.
bool oracle_in_exact(int u, int v, int M, int N, int K) {
    for (int i = 1; i < K; ++i)
        if (static_cast<long long>(u) * K == static_cast<long long>(i) * M) return true;
    for (int j = 1; j < K; ++j)
        if (static_cast<long long>(v) * K == static_cast<long long>(j) * N) return true;
    return false;
}

bool oracle_in_rounded(int u, int v, int M, int N, int K) {
    for (int i = 1; i < K; ++i)
        if (u == static_cast<int>(std::llround(static_cast<double>(i) * M / K))) return true;
    for (int j = 1; j < K; ++j)
        if (v == static_cast<int>(std::llround(static_cast<double>(j) * N / K))) return true;
    return false;
}

bool oracle_in_low(int u, int v, int M, int N, int r) {
    const bool uin = (u >= 0 && u <= r) || (u >= M - r && u < M);
    const bool vin = (v >= 0 && v <= r) || (v >= N - r && v < N);
    return uin && vin;
}

template <class Pred>
std::vector<std::pair<int, int>> enumerate(int M, int N, Pred pred) {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < M; ++u)
        for (int v = 0; v < N; ++v)
            if (pred(u, v)) out.emplace_back(u, v);
    return out;
}

} // namespace

TEST_CASE("dft2 of a constant is DC-only") {
    FeatureTensor x(1, 2, 2);
    std::fill(x.data.begin(), x.data.end(), 1.0);
    const SpectrumTensor g = dft2(x);
    CHECK(g.at(0, 0, 0).real() == doctest::Approx(4.0));
    CHECK(g.at(0, 0, 0).imag() == doctest::Approx(0.0));
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            if (u || v) CHECK(std::abs(g.at(0, u, v)) < 1e-14);
}

TEST_CASE("dft2 of an impulse is flat") {
    FeatureTensor x(1, 3, 4);
    x.at(0, 0, 0) = 1.0;
    const SpectrumTensor g = dft2(x);
    for (int u = 0; u < 3; ++u)
        for (int v = 0; v < 4; ++v)
            CHECK(std::abs(g.at(0, u, v) - std::complex<double>(1.0, 0.0)) < 1e-14);
}

TEST_CASE("idft2 inverts dft2 to 1e-12") {
    for (int trial = 0; trial < 10; ++trial) {
        const FeatureTensor x = seeded_random_tensor(2, 4, 4, 100 + trial);
        CHECK(max_abs_diff(idft2(dft2(x)), x) < 1e-12);
    }
    const FeatureTensor odd = seeded_random_tensor(3, 9, 7, 55);
    CHECK(max_abs_diff(idft2(dft2(odd)), odd) < 1e-12);
}

TEST_CASE("idft2 of a lone DC component is constant") {
    SpectrumTensor g(1, 3, 5);
    g.re[g.idx(0, 0, 0)] = 15.0;  // MN
    const FeatureTensor x = idft2(g);
    for (double v : x.data) CHECK(v == doctest::Approx(1.0));

    SpectrumTensor zero(1, 3, 5);
    for (double v : idft2(zero).data) CHECK(v == 0.0);
}

TEST_CASE("idft2 rejects non-conjugate-symmetric spectra") {
    SpectrumTensor g(1, 4, 4);
    g.re[g.idx(0, 0, 1)] = 1.0;  // partner (0,3) left empty
    CHECK_THROWS_AS(idft2(g), numeric_error);
}

TEST_CASE("dft2 output is conjugate-symmetric for real input") {
    const FeatureTensor x = seeded_random_tensor(2, 6, 9, 77);
    const SpectrumTensor g = dft2(x);
    for (int c = 0; c < 2; ++c)
        for (int u = 0; u < 6; ++u)
            for (int v = 0; v < 9; ++v)
                CHECK(std::abs(g.at(c, u, v) -
                               std::conj(g.at(c, (6 - u) % 6, (9 - v) % 9))) < 1e-10);
}

TEST_CASE("energy is conserved across dft2") {
    for (int trial = 0; trial < 20; ++trial) {
        const FeatureTensor x = seeded_random_tensor(2, 9, 8, 300 + trial);
        const SpectrumTensor g = dft2(x);
        double ex = 0.0, eg = 0.0;
        for (double v : x.data) ex += v * v;
        for (std::size_t i = 0; i < g.re.size(); ++i) eg += g.re[i] * g.re[i] + g.im[i] * g.im[i];
        CHECK(std::abs(ex - eg / 72.0) / ex < 1e-10);
    }
}

TEST_CASE("filter transform of an origin impulse is flat") {
    FilterBank bank(1, 1, 3);
    bank.w(0, 0, 0, 0) = 1.0;
    const FilterSpectrum q = filter_transform(bank, 9, 9);
    for (int u = 0; u < 9; ++u)
        for (int v = 0; v < 9; ++v)
            CHECK(std::abs(q.at(0, 0, u, v) - std::complex<double>(1.0, 0.0)) < 1e-14);
}

TEST_CASE("filter transform roots-of-unity zero and DC sum") {
    FilterBank bank(1, 1, 3);
    std::fill(bank.weights.begin(), bank.weights.end(), 1.0);
    const FilterSpectrum q = filter_transform(bank, 9, 9);
    // (3, 0): sum_t exp(i 2pi t / 3) vanishes
    CHECK(std::abs(q.at(0, 0, 3, 0)) < 1e-13);
    // (0, 0): plain sum of the weights
    CHECK(q.at(0, 0, 0, 0).real() == doctest::Approx(9.0));
    CHECK(q.at(0, 0, 0, 0).imag() == doctest::Approx(0.0));

    CHECK_THROWS_AS(filter_transform(bank, 2, 9), shape_error);
}

TEST_CASE("filter transform equals conjugated dft2 of the zero-padded kernel") {
    for (int trial = 0; trial < 50; ++trial) {
        const int M = 6 + trial % 5, N = 5 + trial % 7;
        const FilterBank bank = seeded_random_bank(2, 2, 3, 700 + trial);
        const FilterSpectrum q = filter_transform(bank, M, N);
        for (int d = 0; d < 2; ++d) {
            for (int c = 0; c < 2; ++c) {
                FeatureTensor padded(1, M, N);
                for (int t = 0; t < 3; ++t)
                    for (int s = 0; s < 3; ++s) padded.at(0, t, s) = bank.w(d, c, t, s);
                const SpectrumTensor g = dft2(padded);
                for (int u = 0; u < M; ++u)
                    for (int v = 0; v < N; ++v)
                        CHECK(std::abs(std::conj(g.at(0, u, v)) - q.at(d, c, u, v)) < 1e-11);
            }
        }
    }
}

TEST_CASE("geometric phase sum closed form") {
    CHECK(geometric_phase_sum(5, 0.0).real() == doctest::Approx(5.0));
    CHECK(geometric_phase_sum(5, 0.0).imag() == 0.0);
    CHECK(std::abs(geometric_phase_sum(3, kTwoPi / 3.0)) < 1e-14);

    // brute-force complex summation oracle
    std::complex<double> brute{0.0, 0.0};
    for (int n = 0; n < 4; ++n) brute += std::polar(1.0, 0.7 * n);
    CHECK(std::abs(geometric_phase_sum(4, 0.7) - brute) < 1e-13);
}

TEST_CASE("geometric phase sum matches brute force on a dense grid") {
    double worst = 0.0;
    for (int n = 1; n <= 20; ++n) {
        for (int j = 0; j <= 40; ++j) {
            const double theta = -6.2 + 12.4 * j / 40.0;
            std::complex<double> brute{0.0, 0.0};
            for (int t = 0; t < n; ++t) brute += std::polar(1.0, theta * t);
            worst = std::max(worst, std::abs(geometric_phase_sum(n, theta) - brute));
        }
        for (int k = 1; k < std::min(n, 6); ++k) {
            const double theta = kTwoPi * k / n;  // root-of-unity zeros
            std::complex<double> brute{0.0, 0.0};
            for (int t = 0; t < n; ++t) brute += std::polar(1.0, theta * t);
            worst = std::max(worst, std::abs(geometric_phase_sum(n, theta) - brute));
        }
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("coupling coefficient at zero offset is exactly K^2") {
    for (int k = 2; k <= 5; ++k) {
        const std::complex<double> a = coupling_coefficient(4, 7, 4, 7, 9, 11, k);
        CHECK(a.real() == static_cast<double>(k) * k);
        CHECK(a.imag() == 0.0);
    }
}

TEST_CASE("coupling coefficient vanishes at offsets M/K") {
    // u - u' = M/K with M divisible by K
    CHECK(std::abs(coupling_coefficient(3, 2, 0, 2, 9, 9, 3)) < 1e-13);
    CHECK(std::abs(coupling_coefficient(0, 4, 0, 0, 9, 8, 2)) < 1e-13);
}

TEST_CASE("coupling coefficient matches the brute-force double sum") {
    Rng rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        const int M = 8, N = 8, K = 3;
        const int u = static_cast<int>(rng.index(M)), u2 = static_cast<int>(rng.index(M));
        const int v = static_cast<int>(rng.index(N)), v2 = static_cast<int>(rng.index(N));
        std::complex<double> brute{0.0, 0.0};
        for (int t = 0; t < K; ++t)
            for (int s = 0; s < K; ++s)
                brute += std::polar(1.0, kTwoPi * ((u - u2) * t / static_cast<double>(M) +
                                                   (v - v2) * s / static_cast<double>(N)));
        CHECK(std::abs(coupling_coefficient(u, v, u2, v2, M, N, K) - brute) < 1e-13);
    }
}

TEST_CASE("coupling table matches pointwise evaluation and is translation-invariant") {
    const int M = 9, N = 8, K = 3;
    const CouplingMatrix cm = build_coupling(M, N, K);
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        const int u = static_cast<int>(rng.index(M)), u2 = static_cast<int>(rng.index(M));
        const int v = static_cast<int>(rng.index(N)), v2 = static_cast<int>(rng.index(N));
        const std::complex<double> a = cm.at(u, v, u2, v2);
        CHECK(std::abs(a - coupling_coefficient(u, v, u2, v2, M, N, K)) < 1e-12);
        // shift both frequencies: exact table equality
        const int du = static_cast<int>(rng.index(M)), dv = static_cast<int>(rng.index(N));
        const std::complex<double> b = cm.at((u + du) % M, (v + dv) % N, (u2 + du) % M,
                                             (v2 + dv) % N);
        CHECK(a == b);
    }
}

TEST_CASE("kronecker delta") {
    CHECK(kronecker_delta(0, 0) == 1);
    CHECK(kronecker_delta(0, 3) == 0);
    CHECK(kronecker_delta(5, 0) == 0);
}

TEST_CASE("exact stable set against the enumeration oracle") {
    {
        const FrequencySet s = stable_set_exact(9, 9, 3);
        const auto expect = enumerate(9, 9, [](int u, int v) {
            return oracle_in_exact(u, v, 9, 9, 3);
        });
        CHECK(s.members == expect);
        CHECK(s.members.size() == 32);  // two full rows and two full columns
        CHECK(s.complete);
    }
    {
        const FrequencySet s = stable_set_exact(8, 8, 3);
        CHECK(s.members.empty());
        CHECK_FALSE(s.complete);
    }
    {
        const FrequencySet s = stable_set_exact(9, 6, 3);
        const auto expect = enumerate(9, 6, [](int u, int v) {
            return oracle_in_exact(u, v, 9, 6, 3);
        });
        CHECK(s.members == expect);
        CHECK(s.complete);
        CHECK(s.contains(3, 0));
        CHECK(s.contains(0, 2));
        CHECK(s.contains(0, 4));
        CHECK_FALSE(s.contains(0, 3));
    }
    CHECK_THROWS_AS(stable_set_exact(9, 9, 1), config_error);
}

TEST_CASE("rounded stable set against the enumeration oracle") {
    {
        const FrequencySet s = stable_set_rounded(9, 9, 3);
        const FrequencySet exact = stable_set_exact(9, 9, 3);
        CHECK(s.members == exact.members);  // rounding is a no-op when K | M, N
    }
    {
        const FrequencySet s = stable_set_rounded(8, 8, 3);
        const auto expect = enumerate(8, 8, [](int u, int v) {
            return oracle_in_rounded(u, v, 8, 8, 3);
        });
        CHECK(s.members == expect);
        CHECK(s.contains(3, 0));  // round(8/3) = 3
        CHECK(s.contains(5, 0));  // round(16/3) = 5
        CHECK_FALSE(s.contains(4, 0));
    }
    {
        const FrequencySet s = stable_set_rounded(8, 8, 2);
        for (const auto& [u, v] : s.members) CHECK((u == 4 || v == 4));
        CHECK(s.members.size() == 15);
    }
}

TEST_CASE("low band set against the enumeration oracle") {
    {
        const FrequencySet s = low_band_set(9, 9, 1);
        const auto expect = enumerate(9, 9, [](int u, int v) {
            return oracle_in_low(u, v, 9, 9, 1);
        });
        CHECK(s.members == expect);
        CHECK(s.members.size() == 9);
        CHECK_FALSE(s.contains(4, 4));
    }
    {
        const FrequencySet s = low_band_set(9, 9, 2);
        CHECK(s.members.size() == 25);
    }
    CHECK_THROWS_AS(low_band_set(9, 9, 0), config_error);
    CHECK_THROWS_AS(low_band_set(9, 9, 3), config_error);
    CHECK_THROWS_AS(low_band_set(4, 9, 2), config_error);
}

TEST_CASE("low pass keeps constants and kills pure high frequencies") {
    FeatureTensor c(1, 9, 9);
    std::fill(c.data.begin(), c.data.end(), 2.5);
    CHECK(max_abs_diff(low_pass(c, 1), c) < 1e-12);

    // (4,4) on an 8x8 grid: x(m,n) = (-1)^(m+n)
    FeatureTensor hi(1, 8, 8);
    for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 8; ++n) hi.at(0, m, n) = ((m + n) % 2 == 0) ? 1.0 : -1.0;
    for (double v : low_pass(hi, 1).data) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("low pass is a projection") {
    for (int trial = 0; trial < 5; ++trial) {
        const FeatureTensor x = seeded_random_tensor(2, 9, 9, 900 + trial);
        const FeatureTensor once = low_pass(x, 1);
        CHECK(max_abs_diff(low_pass(once, 1), once) < 1e-12);
    }
}

TEST_CASE("low pass output spectrum vanishes outside the band") {
    const FrequencySet band = low_band_set(9, 8, 1);
    for (int trial = 0; trial < 100; ++trial) {
        const FeatureTensor x = seeded_random_tensor(1, 9, 8, 1000 + trial);
        const SpectrumTensor g = dft2(low_pass(x, 1));
        for (int u = 0; u < 9; ++u)
            for (int v = 0; v < 8; ++v)
                if (!band.contains(u, v)) CHECK(std::abs(g.at(0, u, v)) < 1e-10);
    }
}
