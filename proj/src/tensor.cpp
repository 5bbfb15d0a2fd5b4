#include "fwm/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "fwm/kernels.hpp"
#include "fwm/rng.hpp"

namespace fwm {

namespace {
void check_extent(int v, const char* what) {
    if (v <= 0) throw shape_error(std::string(what) + " must be positive");
}
} // namespace

FeatureTensor::FeatureTensor(int c, int m, int n) : channels(c), rows(m), cols(n) {
    check_extent(c, "channel count");
    check_extent(m, "row count");
    check_extent(n, "column count");
    data.assign(static_cast<std::size_t>(c) * m * n, 0.0);
}

OutputMap::OutputMap(int m, int n) : rows(m), cols(n) {
    check_extent(m, "row count");
    check_extent(n, "column count");
    data.assign(static_cast<std::size_t>(m) * n, 0.0);
}

FilterBank::FilterBank(int d, int c, int k) : filters(d), channels(c), ksize(k) {
    check_extent(d, "filter count");
    check_extent(c, "channel count");
    check_extent(k, "kernel size");
    weights.assign(static_cast<std::size_t>(d) * c * k * k, 0.0);
    biases.assign(static_cast<std::size_t>(d), 0.0);
}

ComplexMatrix::ComplexMatrix(int m, int n) : rows(m), cols(n) {
    check_extent(m, "row count");
    check_extent(n, "column count");
    re.assign(static_cast<std::size_t>(m) * n, 0.0);
    im.assign(static_cast<std::size_t>(m) * n, 0.0);
}

FeatureTensor seeded_random_tensor(int channels, int rows, int cols,
                                   std::uint64_t seed, double scale) {
    if (scale <= 0.0) throw config_error("scale must be positive");
    FeatureTensor t(channels, rows, cols);
    Rng rng(seed);
    for (double& v : t.data) v = rng.symmetric(scale);
    return t;
}

FilterBank seeded_random_bank(int filters, int channels, int ksize,
                              std::uint64_t seed, double scale) {
    if (scale <= 0.0) throw config_error("scale must be positive");
    FilterBank bank(filters, channels, ksize);
    Rng rng(seed);
    for (double& v : bank.weights) v = rng.symmetric(scale);
    for (double& v : bank.biases) v = rng.symmetric(scale);
    return bank;
}

double l2_norm(std::span<const double> v) {
    return std::sqrt(kernels::active().sumsq(v.data(), v.size()));
}

double l2_norm(const FeatureTensor& t) { return l2_norm(std::span<const double>(t.data)); }
double l2_norm(const OutputMap& m) { return l2_norm(std::span<const double>(m.data)); }
double l2_norm(const FilterBank& bank) { return l2_norm(std::span<const double>(bank.weights)); }

double complex_cosine(std::span<const double> re1, std::span<const double> im1,
                      std::span<const double> re2, std::span<const double> im2) {
    if (re1.size() != im1.size() || re2.size() != im2.size() || re1.size() != re2.size())
        throw shape_error("complex_cosine: vector lengths differ");
    const auto& k = kernels::active();
    const std::size_t n = re1.size();
    const double n1 = k.sumsq(re1.data(), n) + k.sumsq(im1.data(), n);
    const double n2 = k.sumsq(re2.data(), n) + k.sumsq(im2.data(), n);
    if (n1 == 0.0 || n2 == 0.0)
        throw numeric_error("complex_cosine: undefined for a zero vector");
    double dr = 0.0, di = 0.0;
    k.cdotc(re1.data(), im1.data(), re2.data(), im2.data(), n, &dr, &di);
    const double c = dr / (std::sqrt(n1) * std::sqrt(n2));
    return std::clamp(c, -1.0, 1.0);
}

} // namespace fwm
