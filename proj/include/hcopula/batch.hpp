#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hcopula {

/// Row-major sample matrix: one row per sample path, one column per
/// coordinate.
struct Batch {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Batch() = default;
    Batch(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }

    std::span<const double> row(std::size_t i) const {
        return {data.data() + i * cols, cols};
    }
    std::span<double> row(std::size_t i) {
        return {data.data() + i * cols, cols};
    }

    /// Copy of column j.
    std::vector<double> column(std::size_t j) const {
        if (j >= cols) throw std::out_of_range("Batch::column: j=" + std::to_string(j));
        std::vector<double> out(rows);
        for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
        return out;
    }
};

}  // namespace hcopula
