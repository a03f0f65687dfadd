#include "insar/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace insar::fft {

namespace {

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};

using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// FFTW planning is not thread-safe; execution via the new-array interface is.
class PlanCache {
public:
    fftw_plan get(std::size_t rows, std::size_t cols, Direction dir) {
        const auto key = std::make_tuple(rows, cols, dir == Direction::Forward);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second.get();
        const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        std::vector<cdouble> scratch(rows * cols);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan plan = rows == 1
                             ? fftw_plan_dft_1d(static_cast<int>(cols), buf, buf, sign, flags)
                             : fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols),
                                                buf, buf, sign, flags);
        return plans_.emplace(key, PlanHandle(plan)).first->second.get();
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<std::size_t, std::size_t, bool>, PlanHandle> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

}  // namespace

void transform(std::span<cdouble> data, Direction dir) {
    if (data.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(cache().get(1, data.size(), dir), buf, buf);
}

void transform2d(ComplexGrid& grid, Direction dir) {
    if (grid.empty()) return;
    auto* buf = reinterpret_cast<fftw_complex*>(grid.data());
    fftw_execute_dft(cache().get(grid.rows(), grid.cols(), dir), buf, buf);
}

void unitary2d(ComplexGrid& grid, Direction dir) {
    transform2d(grid, dir);
    const double scale = 1.0 / std::sqrt(static_cast<double>(grid.size()));
    for (cdouble& v : grid.values()) v *= scale;
}

}  // namespace insar::fft
