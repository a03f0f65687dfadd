#pragma once

#include <cstddef>
#include <span>

#include "insar/grid.hpp"

namespace insar::fft {

enum class Direction { Forward, Backward };

/// Unnormalized in-place 1D DFT:
///   Forward:  X[k] = sum_m x[m] exp(-j 2 pi k m / n)
///   Backward: x[m] = sum_k X[k] exp(+j 2 pi k m / n)
/// Plans are cached per (length, direction) and are safe to execute from
/// several threads at once.
void transform(std::span<cdouble> data, Direction dir);

/// Unnormalized in-place 2D DFT over a row-major grid.
void transform2d(ComplexGrid& grid, Direction dir);

/// 2D DFT scaled by 1/sqrt(rows * cols) so the pair is unitary.
void unitary2d(ComplexGrid& grid, Direction dir);

}  // namespace insar::fft
