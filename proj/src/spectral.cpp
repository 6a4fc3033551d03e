#include "flf/spectral.hpp"

#include "flf/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace flf {

namespace {

// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct SpectralPlan::Impl {
    double* real = nullptr;
    fftw_complex* freq = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

SpectralPlan::SpectralPlan(int height, int width)
    : height_(height), width_(width), impl_(std::make_unique<Impl>()) {
    if (height <= 0 || width <= 0) {
        throw InvalidArgument("spectral plan needs positive dimensions");
    }
    const std::scoped_lock lock(planner_mutex());
    impl_->real = fftw_alloc_real(static_cast<std::size_t>(height) * width);
    impl_->freq = fftw_alloc_complex(spectrum_size());
    impl_->r2c = fftw_plan_dft_r2c_2d(height, width, impl_->real, impl_->freq, FFTW_ESTIMATE | FFTW_UNALIGNED);
    impl_->c2r = fftw_plan_dft_c2r_2d(height, width, impl_->freq, impl_->real, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (impl_->r2c == nullptr || impl_->c2r == nullptr) {
        throw Error("FFTW planning failed");
    }
}

SpectralPlan::~SpectralPlan() {
    const std::scoped_lock lock(planner_mutex());
    fftw_destroy_plan(impl_->r2c);
    fftw_destroy_plan(impl_->c2r);
    fftw_free(impl_->real);
    fftw_free(impl_->freq);
}

std::size_t SpectralPlan::spectrum_size() const {
    return static_cast<std::size_t>(height_) * (width_ / 2 + 1);
}

void SpectralPlan::forward(std::span<const double> field, std::span<std::complex<double>> spectrum) {
    const std::size_t n = static_cast<std::size_t>(height_) * width_;
    if (field.size() != n || spectrum.size() != spectrum_size()) {
        throw DimensionMismatch("forward transform size mismatch");
    }
    // Out-of-place r2c leaves its input untouched.
    fftw_execute_dft_r2c(impl_->r2c, const_cast<double*>(field.data()),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
}

void SpectralPlan::inverse(std::span<std::complex<double>> spectrum, std::span<double> field) {
    const std::size_t n = static_cast<std::size_t>(height_) * width_;
    if (field.size() != n || spectrum.size() != spectrum_size()) {
        throw DimensionMismatch("inverse transform size mismatch");
    }
    fftw_execute_dft_c2r(impl_->c2r, reinterpret_cast<fftw_complex*>(spectrum.data()), field.data());
}

SpectralPlan& SpectralPlan::local(int height, int width) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<SpectralPlan>> cache;
    auto& slot = cache[{height, width}];
    if (!slot) {
        slot = std::make_unique<SpectralPlan>(height, width);
    }
    return *slot;
}

}  // namespace flf
