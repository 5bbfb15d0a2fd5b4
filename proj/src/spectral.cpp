#include "fwm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fwm/kernels.hpp"

namespace fwm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// val[a][b] = exp(sign * i * 2pi * a * b / denom). Products are reduced
// mod denom before the trig call so the table is exactly periodic.
struct PhaseTable {
    int b_count = 0;
    std::vector<double> re, im;

    PhaseTable(int a_count, int b_count_, int denom, double sign)
        : b_count(b_count_),
          re(static_cast<std::size_t>(a_count) * b_count_),
          im(static_cast<std::size_t>(a_count) * b_count_) {
        for (int a = 0; a < a_count; ++a) {
            for (int b = 0; b < b_count; ++b) {
                const long long k = (static_cast<long long>(a) * b) % denom;
                const double ang = kTwoPi * static_cast<double>(k) / denom;
                const std::size_t i = static_cast<std::size_t>(a) * b_count + b;
                re[i] = std::cos(ang);
                im[i] = sign * std::sin(ang);
            }
        }
    }

    const double* row_re(int a) const { return re.data() + static_cast<std::size_t>(a) * b_count; }
    const double* row_im(int a) const { return im.data() + static_cast<std::size_t>(a) * b_count; }
    double at_re(int a, int b) const { return re[static_cast<std::size_t>(a) * b_count + b]; }
    double at_im(int a, int b) const { return im[static_cast<std::size_t>(a) * b_count + b]; }
};

} // namespace

SpectrumTensor::SpectrumTensor(int c, int m, int n) : channels(c), rows(m), cols(n) {
    if (c <= 0 || m <= 0 || n <= 0) throw shape_error("spectrum extents must be positive");
    re.assign(static_cast<std::size_t>(c) * m * n, 0.0);
    im.assign(static_cast<std::size_t>(c) * m * n, 0.0);
}

FilterSpectrum::FilterSpectrum(int d, int c, int k, int m, int n)
    : filters(d), channels(c), ksize(k), rows(m), cols(n) {
    if (d <= 0 || c <= 0 || k <= 0 || m <= 0 || n <= 0)
        throw shape_error("filter spectrum extents must be positive");
    re.assign(static_cast<std::size_t>(d) * c * m * n, 0.0);
    im.assign(static_cast<std::size_t>(d) * c * m * n, 0.0);
}

bool FrequencySet::contains(int u, int v) const {
    return std::binary_search(members.begin(), members.end(), std::make_pair(u, v));
}

SpectrumTensor dft2(const FeatureTensor& x) {
    const auto& k = kernels::active();
    const int C = x.channels, M = x.rows, N = x.cols;
    const PhaseTable col_ph(N, N, N, -1.0);  // [v][n]
    const PhaseTable row_ph(M, M, M, -1.0);  // [u][m]

    SpectrumTensor g(C, M, N);
    std::vector<double> tre(static_cast<std::size_t>(M) * N), tim(tre.size());
    for (int c = 0; c < C; ++c) {
        // T[m][v] = sum_n X[m][n] exp(-i 2pi v n / N)
        for (int m = 0; m < M; ++m) {
            const double* xr = x.channel(c) + static_cast<std::size_t>(m) * N;
            for (int v = 0; v < N; ++v) {
                tre[static_cast<std::size_t>(m) * N + v] = k.dot(xr, col_ph.row_re(v), N);
                tim[static_cast<std::size_t>(m) * N + v] = k.dot(xr, col_ph.row_im(v), N);
            }
        }
        // G[u][.] = sum_m exp(-i 2pi u m / M) T[m][.]
        double* gre = g.re_channel(c);
        double* gim = g.im_channel(c);
        for (int u = 0; u < M; ++u) {
            double* outr = gre + static_cast<std::size_t>(u) * N;
            double* outi = gim + static_cast<std::size_t>(u) * N;
            for (int m = 0; m < M; ++m) {
                k.caxpy(outr, outi, row_ph.at_re(u, m), row_ph.at_im(u, m),
                        tre.data() + static_cast<std::size_t>(m) * N,
                        tim.data() + static_cast<std::size_t>(m) * N, N);
            }
        }
    }
    return g;
}

SpectrumTensor dft2(const OutputMap& y) {
    FeatureTensor t(1, y.rows, y.cols);
    t.data = y.data;
    return dft2(t);
}

FeatureTensor idft2(const SpectrumTensor& g, double imag_tol) {
    const auto& k = kernels::active();
    const int C = g.channels, M = g.rows, N = g.cols;
    const PhaseTable col_ph(N, N, N, +1.0);  // [v][n]
    const PhaseTable row_ph(M, M, M, +1.0);  // [u][m]
    const double inv = 1.0 / (static_cast<double>(M) * N);

    FeatureTensor x(C, M, N);
    std::vector<double> sre(static_cast<std::size_t>(M) * N), sim(sre.size());
    std::vector<double> ore(sre.size()), oim(sre.size());
    double max_resid = 0.0;
    for (int c = 0; c < C; ++c) {
        std::fill(sre.begin(), sre.end(), 0.0);
        std::fill(sim.begin(), sim.end(), 0.0);
        // S[u][n] = sum_v G[u][v] exp(+i 2pi v n / N)
        for (int u = 0; u < M; ++u) {
            double* outr = sre.data() + static_cast<std::size_t>(u) * N;
            double* outi = sim.data() + static_cast<std::size_t>(u) * N;
            const double* gr = g.re_channel(c) + static_cast<std::size_t>(u) * N;
            const double* gi = g.im_channel(c) + static_cast<std::size_t>(u) * N;
            for (int v = 0; v < N; ++v)
                k.caxpy(outr, outi, gr[v], gi[v], col_ph.row_re(v), col_ph.row_im(v), N);
        }
        std::fill(ore.begin(), ore.end(), 0.0);
        std::fill(oim.begin(), oim.end(), 0.0);
        for (int m = 0; m < M; ++m) {
            double* outr = ore.data() + static_cast<std::size_t>(m) * N;
            double* outi = oim.data() + static_cast<std::size_t>(m) * N;
            for (int u = 0; u < M; ++u)
                k.caxpy(outr, outi, row_ph.at_re(u, m), row_ph.at_im(u, m),
                        sre.data() + static_cast<std::size_t>(u) * N,
                        sim.data() + static_cast<std::size_t>(u) * N, N);
        }
        double* xc = x.channel(c);
        for (std::size_t i = 0; i < ore.size(); ++i) {
            xc[i] = ore[i] * inv;
            max_resid = std::max(max_resid, std::abs(oim[i] * inv));
        }
    }
    if (max_resid >= imag_tol)
        throw numeric_error("idft2: spectrum is not conjugate-symmetric (imaginary residue " +
                            std::to_string(max_resid) + ")");
    return x;
}

FilterSpectrum filter_transform(const FilterBank& bank, int rows, int cols) {
    if (rows < bank.ksize || cols < bank.ksize)
        throw shape_error("filter_transform: feature grid smaller than the kernel");
    const auto& k = kernels::active();
    const int D = bank.filters, C = bank.channels, K = bank.ksize;
    const int M = rows, N = cols;
    const PhaseTable col_ph(K, N, N, +1.0);  // [s][v]
    const PhaseTable row_ph(M, K, M, +1.0);  // [u][t]

    FilterSpectrum q(D, C, K, M, N);
    std::vector<double> rre(static_cast<std::size_t>(K) * N), rim(rre.size());
    for (int d = 0; d < D; ++d) {
        for (int c = 0; c < C; ++c) {
            std::fill(rre.begin(), rre.end(), 0.0);
            std::fill(rim.begin(), rim.end(), 0.0);
            // R[t][v] = sum_s W[t][s] exp(+i 2pi v s / N)
            for (int t = 0; t < K; ++t) {
                double* outr = rre.data() + static_cast<std::size_t>(t) * N;
                double* outi = rim.data() + static_cast<std::size_t>(t) * N;
                for (int s = 0; s < K; ++s)
                    k.caxpy(outr, outi, bank.w(d, c, t, s), 0.0, col_ph.row_re(s),
                            col_ph.row_im(s), N);
            }
            // Q[u][.] = sum_t exp(+i 2pi u t / M) R[t][.]
            for (int u = 0; u < M; ++u) {
                double* outr = q.re.data() + q.idx(d, c, u, 0);
                double* outi = q.im.data() + q.idx(d, c, u, 0);
                for (int t = 0; t < K; ++t)
                    k.caxpy(outr, outi, row_ph.at_re(u, t), row_ph.at_im(u, t),
                            rre.data() + static_cast<std::size_t>(t) * N,
                            rim.data() + static_cast<std::size_t>(t) * N, N);
            }
        }
    }
    return q;
}

std::complex<double> geometric_phase_sum(int count, double theta) {
    if (count < 1) throw config_error("geometric_phase_sum: count must be >= 1");
    const double half = 0.5 * theta;
    const double denom = std::sin(half);
    // theta == 0 (mod 2pi): every term is 1. The cutoff keeps the ratio away
    // from 0/0 while staying far below any frequency spacing in use.
    if (std::abs(denom) < 1e-12) return {static_cast<double>(count), 0.0};
    const double ratio = std::sin(count * half) / denom;
    const double phase = (count - 1) * half;
    return {ratio * std::cos(phase), ratio * std::sin(phase)};
}

std::complex<double> coupling_coefficient(int u, int v, int u2, int v2,
                                          int rows, int cols, int ksize) {
    const std::complex<double> a =
        geometric_phase_sum(ksize, kTwoPi * static_cast<double>(u - u2) / rows);
    const std::complex<double> b =
        geometric_phase_sum(ksize, kTwoPi * static_cast<double>(v - v2) / cols);
    return a * b;
}

CouplingMatrix build_coupling(int rows, int cols, int ksize) {
    CouplingMatrix cm;
    cm.rows = rows;
    cm.cols = cols;
    cm.ksize = ksize;
    cm.re.resize(static_cast<std::size_t>(rows) * cols);
    cm.im.resize(cm.re.size());
    std::vector<std::complex<double>> du_sum(rows), dv_sum(cols);
    for (int du = 0; du < rows; ++du)
        du_sum[du] = geometric_phase_sum(ksize, kTwoPi * du / rows);
    for (int dv = 0; dv < cols; ++dv)
        dv_sum[dv] = geometric_phase_sum(ksize, kTwoPi * dv / cols);
    for (int du = 0; du < rows; ++du) {
        for (int dv = 0; dv < cols; ++dv) {
            const std::complex<double> a = du_sum[du] * dv_sum[dv];
            cm.re[static_cast<std::size_t>(du) * cols + dv] = a.real();
            cm.im[static_cast<std::size_t>(du) * cols + dv] = a.imag();
        }
    }
    return cm;
}

int kronecker_delta(int u, int v) { return (u == 0 && v == 0) ? 1 : 0; }

namespace {

// Round i*M/K half-away-from-zero; everything is positive here so this is
// floor(i*M/K + 1/2) in exact integer arithmetic.
int round_fraction(int i, int M, int K) {
    return static_cast<int>((2LL * i * M + K) / (2LL * K));
}

FrequencySet cross_set(FreqSetKind kind, int rows, int cols, int ksize,
                       const std::vector<int>& us, const std::vector<int>& vs,
                       bool complete) {
    FrequencySet set;
    set.kind = kind;
    set.rows = rows;
    set.cols = cols;
    set.ksize = ksize;
    set.complete = complete;
    std::vector<char> in_u(rows, 0), in_v(cols, 0);
    for (int u : us)
        if (u >= 0 && u < rows) in_u[u] = 1;
    for (int v : vs)
        if (v >= 0 && v < cols) in_v[v] = 1;
    for (int u = 0; u < rows; ++u)
        for (int v = 0; v < cols; ++v)
            if (in_u[u] || in_v[v]) set.members.emplace_back(u, v);
    return set;
}

} // namespace

FrequencySet stable_set_exact(int rows, int cols, int ksize) {
    if (ksize < 2) throw config_error("stable sets need kernel size >= 2");
    std::vector<int> us, vs;
    bool complete = true;
    for (int i = 1; i < ksize; ++i) {
        if ((static_cast<long long>(i) * rows) % ksize == 0)
            us.push_back(i * rows / ksize);
        else
            complete = false;
        if ((static_cast<long long>(i) * cols) % ksize == 0)
            vs.push_back(i * cols / ksize);
        else
            complete = false;
    }
    return cross_set(FreqSetKind::StableExact, rows, cols, ksize, us, vs, complete);
}

FrequencySet stable_set_rounded(int rows, int cols, int ksize) {
    if (ksize < 2) throw config_error("stable sets need kernel size >= 2");
    std::vector<int> us, vs;
    for (int i = 1; i < ksize; ++i) {
        us.push_back(round_fraction(i, rows, ksize));
        vs.push_back(round_fraction(i, cols, ksize));
    }
    return cross_set(FreqSetKind::StableRounded, rows, cols, ksize, us, vs, true);
}

FrequencySet low_band_set(int rows, int cols, int radius) {
    if (radius < 1 || radius > 2)
        throw config_error("low band radius must be 1 or 2");
    if (2 * radius + 1 > std::min(rows, cols))
        throw config_error("low band radius too large for the grid");
    FrequencySet set;
    set.kind = FreqSetKind::LowBand;
    set.rows = rows;
    set.cols = cols;
    set.radius = radius;
    auto in_band = [radius](int i, int extent) {
        return i <= radius || i >= extent - radius;
    };
    for (int u = 0; u < rows; ++u)
        for (int v = 0; v < cols; ++v)
            if (in_band(u, rows) && in_band(v, cols)) set.members.emplace_back(u, v);
    return set;
}

FeatureTensor low_pass(const FeatureTensor& x, int radius) {
    const FrequencySet band = low_band_set(x.rows, x.cols, radius);
    std::vector<char> keep(static_cast<std::size_t>(x.rows) * x.cols, 0);
    for (const auto& [u, v] : band.members)
        keep[static_cast<std::size_t>(u) * x.cols + v] = 1;

    SpectrumTensor g = dft2(x);
    for (int c = 0; c < x.channels; ++c) {
        double* gr = g.re_channel(c);
        double* gi = g.im_channel(c);
        for (std::size_t i = 0; i < keep.size(); ++i) {
            if (!keep[i]) {
                gr[i] = 0.0;
                gi[i] = 0.0;
            }
        }
    }
    return idft2(g);
}

} // namespace fwm
