#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fwm/analysis.hpp"
#include "fwm/rng.hpp"

using namespace fwm;

namespace {

std::vector<OutputMap> random_upstream(int filters, int rows, int cols, Rng& rng) {
    std::vector<OutputMap> u;
    for (int d = 0; d < filters; ++d) {
        OutputMap m(rows, cols);
        for (double& v : m.data) v = rng.symmetric(1.0);
        u.push_back(std::move(m));
    }
    return u;
}

std::vector<SpectrumTensor> upstream_spectra(const std::vector<OutputMap>& upstream) {
    std::vector<SpectrumTensor> ps;
    for (const OutputMap& u : upstream) ps.push_back(loss_spectrum(u));
    return ps;
}

// End-to-end route: real backward pass, one step, re-transform.
FilterSpectrum actual_delta(const FilterBank& bank, const FeatureTensor& x,
                            const std::vector<OutputMap>& upstream, double eta) {
    GradientBundle grads = conv_backward(bank, x, upstream, false);
    const FilterBank after = sgd_step(bank, grads, SgdConfig{eta, 1});
    FilterSpectrum qa = filter_transform(after, x.rows, x.cols);
    const FilterSpectrum qb = filter_transform(bank, x.rows, x.cols);
    for (std::size_t i = 0; i < qa.re.size(); ++i) {
        qa.re[i] -= qb.re[i];
        qa.im[i] -= qb.im[i];
    }
    return qa;
}

double max_delta_diff(const DeltaSpectrum& pred, const FilterSpectrum& act) {
    double dev = 0.0;
    for (std::size_t i = 0; i < pred.re.size(); ++i)
        dev = std::max(dev, std::hypot(pred.re[i] - act.re[i], pred.im[i] - act.im[i]));
    return dev;
}

} // namespace

TEST_CASE("zero upstream predicts zero spectral change") {
    const FilterBank bank = seeded_random_bank(2, 2, 3, 1);
    const FeatureTensor x = seeded_random_tensor(2, 9, 9, 2);
    std::vector<OutputMap> upstream(2, OutputMap(9, 9));
    const DeltaSpectrum d = predict_delta(bank, dft2(x), upstream_spectra(upstream), 0.1);
    for (double v : d.re) CHECK(v == 0.0);
    for (double v : d.im) CHECK(v == 0.0);
    for (double v : d.norms) CHECK(v == 0.0);
}

TEST_CASE("DC-only input zeroes the prediction on the stable set") {
    const int M = 9, N = 9;
    FeatureTensor x(2, M, N);
    for (int c = 0; c < 2; ++c)
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n) x.at(c, m, n) = 1.0 + 0.5 * c;
    const FilterBank bank = seeded_random_bank(3, 2, 3, 3);
    Rng rng(4);
    const auto upstream = random_upstream(3, M, N, rng);
    const DeltaSpectrum d = predict_delta(bank, dft2(x), upstream_spectra(upstream), 0.1);
    const FrequencySet s = stable_set_exact(M, N, 3);
    for (const auto& [u, v] : s.members)
        CHECK(d.norms[static_cast<std::size_t>(u) * N + v] < 1e-12);
}

TEST_CASE("prediction matches the backward+step+transform route") {
    Rng rng(5);
    const int chans[3] = {1, 2, 4};
    for (int trial = 0; trial < 8; ++trial) {
        const int C = chans[trial % 3];
        const int M = (trial % 2) ? 8 : 9, N = (trial % 2) ? 12 : 9;
        const FilterBank bank = seeded_random_bank(2, C, 3, 100 + trial);
        const FeatureTensor x = seeded_random_tensor(C, M, N, 200 + trial);
        Rng sub = rng.fork(trial);
        const auto upstream = random_upstream(2, M, N, sub);
        const DeltaSpectrum pred = predict_delta(bank, dft2(x), upstream_spectra(upstream), 0.05);
        CHECK(max_delta_diff(pred, actual_delta(bank, x, upstream, 0.05)) < 1e-9);
    }
}

TEST_CASE("prediction is linear in the learning rate and the upstream") {
    const FilterBank bank = seeded_random_bank(2, 2, 3, 7);
    const FeatureTensor x = seeded_random_tensor(2, 9, 9, 8);
    Rng rng(9);
    const auto upstream = random_upstream(2, 9, 9, rng);
    const auto ps = upstream_spectra(upstream);
    const DeltaSpectrum base = predict_delta(bank, dft2(x), ps, 0.05);
    const DeltaSpectrum doubled_eta = predict_delta(bank, dft2(x), ps, 0.10);

    std::vector<OutputMap> upstream3 = upstream;
    for (OutputMap& m : upstream3)
        for (double& v : m.data) v *= 3.0;
    const DeltaSpectrum tripled_up = predict_delta(bank, dft2(x), upstream_spectra(upstream3), 0.05);

    for (std::size_t i = 0; i < base.re.size(); ++i) {
        CHECK(doubled_eta.re[i] == doctest::Approx(2.0 * base.re[i]).epsilon(1e-12));
        CHECK(doubled_eta.im[i] == doctest::Approx(2.0 * base.im[i]).epsilon(1e-12));
        CHECK(tripled_up.re[i] == doctest::Approx(3.0 * base.re[i]).epsilon(1e-10));
        CHECK(tripled_up.im[i] == doctest::Approx(3.0 * base.im[i]).epsilon(1e-10));
    }
}

TEST_CASE("delta norms are the mean channel-vector norm over filters") {
    const FilterBank bank = seeded_random_bank(3, 2, 3, 11);
    const FeatureTensor x = seeded_random_tensor(2, 9, 8, 12);
    Rng rng(13);
    const auto upstream = random_upstream(3, 9, 8, rng);
    const DeltaSpectrum d = predict_delta(bank, dft2(x), upstream_spectra(upstream), 0.1);
    for (int u = 0; u < 9; ++u) {
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int f = 0; f < 3; ++f) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const std::size_t i = d.idx(f, c, u, v);
                    s += d.re[i] * d.re[i] + d.im[i] * d.im[i];
                }
                acc += std::sqrt(s);
            }
            CHECK(d.norms[static_cast<std::size_t>(u) * 8 + v] ==
                  doctest::Approx(acc / 3.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("step equivalence deviation") {
    const FilterBank bank = seeded_random_bank(2, 2, 3, 21);
    const FeatureTensor x = seeded_random_tensor(2, 9, 9, 22);

    std::vector<OutputMap> zero(2, OutputMap(9, 9));
    CHECK(verify_step_equivalence(bank, x, zero, 0.1).max_deviation == 0.0);

    Rng rng(23);
    const auto upstream = random_upstream(2, 9, 9, rng);
    CHECK(verify_step_equivalence(bank, x, upstream, 0.1).max_deviation < 1e-9);
}

TEST_CASE("one-step spectral change is linear in eta") {
    const FilterBank bank = seeded_random_bank(2, 2, 3, 25);
    const FeatureTensor x = seeded_random_tensor(2, 9, 9, 26);
    Rng rng(27);
    const auto upstream = random_upstream(2, 9, 9, rng);
    const FilterSpectrum d1 = actual_delta(bank, x, upstream, 0.05);
    const FilterSpectrum d2 = actual_delta(bank, x, upstream, 0.10);
    for (std::size_t i = 0; i < d1.re.size(); ++i) {
        CHECK(d2.re[i] == doctest::Approx(2.0 * d1.re[i]).epsilon(1e-9));
        CHECK(d2.im[i] == doctest::Approx(2.0 * d1.im[i]).epsilon(1e-9));
    }
}

TEST_CASE("stability heatmap basics") {
    const FilterBank bank = seeded_random_bank(3, 2, 3, 31);
    const auto zero_map = stability_heatmap(bank, bank, 9, 9);
    for (double v : zero_map) CHECK(v == 0.0);

    FilterBank twice = bank;
    for (double& w : twice.weights) w *= 2.0;
    const auto hm = stability_heatmap(bank, twice, 9, 9);

    // after = 2 * before, so the drift equals the mean spectrum norm itself
    const FilterSpectrum q = filter_transform(bank, 9, 9);
    for (int u = 0; u < 9; ++u) {
        for (int v = 0; v < 9; ++v) {
            double acc = 0.0;
            for (int d = 0; d < 3; ++d) {
                double s = 0.0;
                for (int c = 0; c < 2; ++c) {
                    const std::size_t i = q.idx(d, c, u, v);
                    s += q.re[i] * q.re[i] + q.im[i] * q.im[i];
                }
                acc += std::sqrt(s);
            }
            CHECK(hm[static_cast<std::size_t>(u) * 9 + v] ==
                  doctest::Approx(acc / 3.0).epsilon(1e-11));
        }
    }

    const FilterBank other = seeded_random_bank(3, 2, 5, 32);
    CHECK_THROWS_AS(stability_heatmap(bank, other, 9, 9), shape_error);
}

TEST_CASE("center shift moves (0,0) to the grid center") {
    std::vector<double> hm(9 * 9, 0.0);
    hm[0] = 1.0;  // (0,0)
    const auto shifted = center_shift(hm, 9, 9);
    CHECK(shifted[4 * 9 + 4] == 1.0);
    double total = 0.0;
    for (double v : shifted) total += v;
    CHECK(total == 1.0);
}

TEST_CASE("heatmap set means") {
    const FrequencySet s = stable_set_rounded(9, 9, 3);
    std::vector<double> zeros(81, 0.0);
    auto [zin, zout] = heatmap_set_means(zeros, 9, 9, s);
    CHECK(zin == 0.0);
    CHECK(zout == 0.0);

    std::vector<double> indicator(81, 0.0);
    for (const auto& [u, v] : s.members) indicator[static_cast<std::size_t>(u) * 9 + v] = 1.0;
    auto [oin, oout] = heatmap_set_means(indicator, 9, 9, s);
    CHECK(oin == doctest::Approx(1.0));
    CHECK(oout == doctest::Approx(0.0));

    FrequencySet empty = s;
    empty.members.clear();
    CHECK_THROWS_AS(heatmap_set_means(zeros, 9, 9, empty), config_error);
}

TEST_CASE("multi-step drift with DC-only input spares the stable set") {
    const int M = 9, N = 9;
    FeatureTensor x(2, M, N);
    for (int c = 0; c < 2; ++c)
        for (int m = 0; m < M; ++m)
            for (int n = 0; n < N; ++n) x.at(c, m, n) = 0.8 + 0.4 * c;

    FilterBank bank = seeded_random_bank(4, 2, 3, 41);
    const FilterBank start = bank;
    Rng rng(42);
    for (int step = 0; step < 100; ++step) {
        const auto upstream = random_upstream(4, M, N, rng);
        bank = sgd_step(bank, conv_backward(bank, x, upstream, false), SgdConfig{0.05, 1});
    }
    const auto hm = stability_heatmap(start, bank, M, N);
    const FrequencySet s = stable_set_exact(M, N, 3);
    auto [on_set, off_set] = heatmap_set_means(hm, M, N, s);
    CHECK(on_set < 1e-10);
    CHECK(off_set > 1e-4);
}

TEST_CASE("verifier suite passes end to end") {
    for (const VerifierResult& r : run_verifier_suite(123)) {
        CAPTURE(r.name);
        CHECK(r.pass);
    }
}
