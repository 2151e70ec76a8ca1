#pragma once

#include "polaron/grid.hpp"

namespace polaron::fft {

// Unnormalized 3D DFTs on an n^3 grid: forward uses e^{-i k x}, backward e^{+i k x}.
// Plans are cached per n and created with FFTW_ESTIMATE, so results are
// reproducible run to run. Not thread-safe.
void forward(int n, Eigen::VectorXcd& data);
void backward(int n, Eigen::VectorXcd& data);

// |k|^2 on FFT ordering for the given grid.
const Eigen::VectorXd& k_squared(const Grid3& g);

}  // namespace polaron::fft
