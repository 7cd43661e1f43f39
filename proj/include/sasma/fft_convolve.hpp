#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace sasma::detail {

// FFTW's planner is not re-entrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const noexcept { fftw_free(p); }
};

struct FftwPlanDeleter {
    void operator()(fftw_plan p) const noexcept {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(p);
    }
};

using FftwPlan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, FftwPlanDeleter>;

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * count)));
}

// Smallest 2^a 3^b 5^c not below n.
inline std::size_t fft_good_size(std::size_t n) {
    std::size_t best = 1;
    while (best < n) best <<= 1;
    for (std::size_t p5 = 1; p5 < best; p5 *= 5)
        for (std::size_t p35 = p5; p35 < best; p35 *= 3) {
            std::size_t v = p35;
            while (v < n) v <<= 1;
            if (v < best) best = v;
        }
    return best;
}

/// Rows [row_lo, row_lo + out_rows) x columns [col_lo, col_lo + out_cols) of
/// the full linear convolution of two row-major arrays a (ar x ac) and
/// b (br x bc). One-dimensional inputs use ar = br = 1.
inline std::vector<double> fft_convolve_2d(std::span<const double> a, std::size_t ar, std::size_t ac,
                                           std::span<const double> b, std::size_t br, std::size_t bc,
                                           std::size_t row_lo, std::size_t out_rows, std::size_t col_lo,
                                           std::size_t out_cols) {
    const std::size_t rows = ar + br - 1 == 1 ? 1 : fft_good_size(ar + br - 1);
    const std::size_t cols = fft_good_size(ac + bc - 1);
    const std::size_t half = cols / 2 + 1;
    const std::size_t real_size = rows * cols;
    const std::size_t spec_size = rows * half;

    auto ra = fftw_buffer<double>(real_size);
    auto rb = fftw_buffer<double>(real_size);
    auto fa = fftw_buffer<fftw_complex>(spec_size);
    auto fb = fftw_buffer<fftw_complex>(spec_size);

    FftwPlan forward_a, forward_b, backward;
    {
        std::lock_guard lock(fftw_planner_mutex());
        const int r = static_cast<int>(rows);
        const int c = static_cast<int>(cols);
        if (rows == 1) {
            forward_a.reset(fftw_plan_dft_r2c_1d(c, ra.get(), fa.get(), FFTW_ESTIMATE));
            forward_b.reset(fftw_plan_dft_r2c_1d(c, rb.get(), fb.get(), FFTW_ESTIMATE));
            backward.reset(fftw_plan_dft_c2r_1d(c, fa.get(), ra.get(), FFTW_ESTIMATE));
        } else {
            forward_a.reset(fftw_plan_dft_r2c_2d(r, c, ra.get(), fa.get(), FFTW_ESTIMATE));
            forward_b.reset(fftw_plan_dft_r2c_2d(r, c, rb.get(), fb.get(), FFTW_ESTIMATE));
            backward.reset(fftw_plan_dft_c2r_2d(r, c, fa.get(), ra.get(), FFTW_ESTIMATE));
        }
    }

    auto load = [&](double* dst, std::span<const double> src, std::size_t sr, std::size_t sc) {
        std::fill(dst, dst + real_size, 0.0);
        for (std::size_t i = 0; i < sr; ++i)
            for (std::size_t j = 0; j < sc; ++j) dst[i * cols + j] = src[i * sc + j];
    };
    load(ra.get(), a, ar, ac);
    load(rb.get(), b, br, bc);
    fftw_execute(forward_a.get());
    fftw_execute(forward_b.get());
    for (std::size_t k = 0; k < spec_size; ++k) {
        const double re = fa[k][0] * fb[k][0] - fa[k][1] * fb[k][1];
        const double im = fa[k][0] * fb[k][1] + fa[k][1] * fb[k][0];
        fa[k][0] = re;
        fa[k][1] = im;
    }
    fftw_execute(backward.get());

    const double scale = 1.0 / static_cast<double>(real_size);
    std::vector<double> out(out_rows * out_cols);
    for (std::size_t i = 0; i < out_rows; ++i)
        for (std::size_t j = 0; j < out_cols; ++j)
            out[i * out_cols + j] = ra[(row_lo + i) * cols + (col_lo + j)] * scale;
    return out;
}

}  // namespace sasma::detail
