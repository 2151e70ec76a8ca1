#include "polaron/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <memory>
#include <utility>

namespace polaron::fft {
namespace {

class Plan {
public:
    explicit Plan(int n) : size_(std::size_t(n) * n * n) {
        buffer_ = fftw_alloc_complex(size_);
        fwd_ = fftw_plan_dft_3d(n, n, n, buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_3d(n, n, n, buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~Plan() {
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buffer_);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    void run(Eigen::VectorXcd& data, bool forward) {
        static_assert(sizeof(cd) == sizeof(fftw_complex));
        std::memcpy(buffer_, data.data(), size_ * sizeof(fftw_complex));
        fftw_execute(forward ? fwd_ : bwd_);
        std::memcpy(static_cast<void*>(data.data()), buffer_, size_ * sizeof(fftw_complex));
    }

private:
    std::size_t size_;
    fftw_complex* buffer_{nullptr};
    fftw_plan fwd_{};
    fftw_plan bwd_{};
};

Plan& plan_for(int n) {
    static std::map<int, std::unique_ptr<Plan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<Plan>(n)).first;
    }
    return *it->second;
}

}  // namespace

void forward(int n, Eigen::VectorXcd& data) { plan_for(n).run(data, true); }

void backward(int n, Eigen::VectorXcd& data) { plan_for(n).run(data, false); }

const Eigen::VectorXd& k_squared(const Grid3& g) {
    static std::map<std::pair<int, double>, Eigen::VectorXd> cache;
    const auto key = std::make_pair(g.n(), g.box_length());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const int n = g.n();
    const double unit = g.wavenumber_unit();
    Eigen::VectorXd k2(g.size());
    for (int a = 0; a < n; ++a) {
        const double ka = unit * g.frequency(a);
        for (int b = 0; b < n; ++b) {
            const double kb = unit * g.frequency(b);
            for (int c = 0; c < n; ++c) {
                const double kc = unit * g.frequency(c);
                k2[g.flatten(a, b, c)] = ka * ka + kb * kb + kc * kc;
            }
        }
    }
    return cache.emplace(key, std::move(k2)).first->second;
}

}  // namespace polaron::fft
