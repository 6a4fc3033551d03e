#pragma once

#include <complex>
#include <memory>
#include <span>

namespace flf {

/// Real 2-D FFT pair for one world size, backed by FFTW.
///
/// Plans are created with FFTW_ESTIMATE so the chosen algorithm (and hence
/// every rounding) is identical from run to run, and with FFTW_UNALIGNED so
/// they execute directly on caller buffers. Use `SpectralPlan::local` to get a
/// per-thread cached instance.
class SpectralPlan {
public:
    SpectralPlan(int height, int width);
    ~SpectralPlan();
    SpectralPlan(const SpectralPlan&) = delete;
    SpectralPlan& operator=(const SpectralPlan&) = delete;

    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int width() const { return width_; }
    /// Number of complex coefficients in a half spectrum: H * (W/2 + 1).
    [[nodiscard]] std::size_t spectrum_size() const;

    void forward(std::span<const double> field, std::span<std::complex<double>> spectrum);
    /// Unnormalized inverse: the result is scaled by H*W. `spectrum` is used
    /// as workspace and holds garbage afterwards.
    void inverse(std::span<std::complex<double>> spectrum, std::span<double> field);

    static SpectralPlan& local(int height, int width);

private:
    struct Impl;
    int height_;
    int width_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace flf
