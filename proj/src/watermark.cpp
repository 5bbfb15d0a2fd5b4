#include "fwm/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "fwm/conv.hpp"

namespace fwm {

namespace {

// Kuhn-Munkres on a square cost matrix (minimization), O(n^3).
// Returns row -> column.
std::vector<int> assign_min_cost(const std::vector<double>& cost, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// Cosine of the channel vectors of two signature components; -1 when either
// vector is zero (undefined similarity counts as a non-match).
double component_cosine(const WatermarkSignature& a, int da, const WatermarkSignature& b,
                        int db, int k) {
    const int C = a.channels;
    std::vector<double> ar(C), ai(C), br(C), bi(C);
    for (int c = 0; c < C; ++c) {
        ar[c] = a.re[a.idx(da, c, k)];
        ai[c] = a.im[a.idx(da, c, k)];
        br[c] = b.re[b.idx(db, c, k)];
        bi[c] = b.im[b.idx(db, c, k)];
    }
    try {
        return complex_cosine(ar, ai, br, bi);
    } catch (const numeric_error&) {
        return -1.0;
    }
}

} // namespace

std::vector<OutputMap> wm_forward(const WatermarkModule& module, const FeatureTensor& x) {
    if (x.rows != module.rows || x.cols != module.cols)
        throw shape_error("wm_forward: input grid does not match the module");
    return conv_forward(module.bank, low_pass(x, module.radius));
}

WatermarkSignature extract_signature(const WatermarkModule& module) {
    const FrequencySet carriers =
        stable_set_rounded(module.rows, module.cols, module.bank.ksize);
    const FilterSpectrum q = filter_transform(module.bank, module.rows, module.cols);

    WatermarkSignature sig;
    sig.filters = module.bank.filters;
    sig.channels = module.bank.channels;
    sig.ksize = module.bank.ksize;
    sig.rows = module.rows;
    sig.cols = module.cols;
    sig.radius = module.radius;
    sig.frequencies = carriers.members;
    sig.re.resize(static_cast<std::size_t>(sig.filters) * sig.channels * sig.frequencies.size());
    sig.im.resize(sig.re.size());
    for (int d = 0; d < sig.filters; ++d) {
        for (int c = 0; c < sig.channels; ++c) {
            for (std::size_t k = 0; k < sig.frequencies.size(); ++k) {
                const auto& [u, v] = sig.frequencies[k];
                const std::size_t src = q.idx(d, c, u, v);
                const std::size_t dst = sig.idx(d, c, static_cast<int>(k));
                sig.re[dst] = q.re[src];
                sig.im[dst] = q.im[src];
            }
        }
    }
    return sig;
}

std::vector<int> match_filters(const WatermarkSignature& src, const WatermarkSignature& sus) {
    if (!src.compatible(sus))
        throw data_error("match_filters: signature geometries are incompatible");
    const int D = src.filters;
    const std::size_t F = src.frequencies.size();

    // score(d, d') = mean cosine over carrier frequencies; assignment
    // minimizes the negative score.
    std::vector<double> cost(static_cast<std::size_t>(D) * D);
    for (int d = 0; d < D; ++d) {
        for (int d2 = 0; d2 < D; ++d2) {
            double acc = 0.0;
            for (std::size_t k = 0; k < F; ++k)
                acc += component_cosine(src, d, sus, d2, static_cast<int>(k));
            cost[static_cast<std::size_t>(d) * D + d2] = -acc / static_cast<double>(F);
        }
    }
    return assign_min_cost(cost, D);
}

DetectionReport detect(const WatermarkSignature& src, const WatermarkSignature& sus,
                       double tau) {
    if (!(tau > 0.0 && tau <= 1.0))
        throw config_error("detect: tau must lie in (0, 1]");
    DetectionReport rep;
    rep.tau = tau;
    rep.permutation = match_filters(src, sus);

    const int D = src.filters;
    const std::size_t F = src.frequencies.size();
    rep.cosines.resize(static_cast<std::size_t>(D) * F);
    std::size_t hits = 0;
    for (int d = 0; d < D; ++d) {
        for (std::size_t k = 0; k < F; ++k) {
            const double c = component_cosine(src, d, sus, rep.permutation[d],
                                              static_cast<int>(k));
            rep.cosines[static_cast<std::size_t>(d) * F + k] = c;
            if (c >= tau) ++hits;
        }
    }
    rep.dr = 100.0 * static_cast<double>(hits) / static_cast<double>(D * F);
    return rep;
}

} // namespace fwm
