#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>

#include "hcopula/batch.hpp"
#include "hcopula/pushforward.hpp"

// CSV emission and ingestion. All floating-point output uses 17 significant
// digits so that files round-trip doubles losslessly; rows end with '\n'.

namespace hcopula {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

/// Header `coord_1,...,coord_k`, one row per sample.
inline void write_batch_csv(std::ostream& os, const Batch& batch) {
    for (std::size_t j = 0; j < batch.cols; ++j) {
        if (j) os << ',';
        os << "coord_" << (j + 1);
    }
    os << '\n';
    for (std::size_t i = 0; i < batch.rows; ++i) {
        for (std::size_t j = 0; j < batch.cols; ++j) {
            if (j) os << ',';
            os << detail::format_double(batch.at(i, j));
        }
        os << '\n';
    }
}

inline void write_batch_csv(const std::string& path, const Batch& batch) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_batch_csv(os, batch);
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

/// Parses a CSV with a mandatory header row; every data cell must be a
/// finite double.
inline Batch read_batch_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("CSV input is empty");
    std::size_t cols = 1;
    for (char c : line) {
        if (c == ',') ++cols;
    }
    Batch batch;
    batch.cols = cols;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t j = 0;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || !std::isfinite(v)) {
                throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                         ": cannot parse '" + cell + "' as a number");
            }
            batch.data.push_back(v);
            ++j;
        }
        if (j != cols) {
            throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(cols) + " fields, got " +
                                     std::to_string(j));
        }
        ++batch.rows;
    }
    if (batch.rows == 0) throw std::runtime_error("CSV input has no data rows");
    return batch;
}

inline Batch read_batch_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "' for reading");
    return read_batch_csv(is);
}

/// Long-format grid CSV: axis columns `u_1,...,u_k` then `value`, one row per
/// lattice point in lexicographic order.
inline void write_grid_csv(std::ostream& os, const EmpiricalCopulaGrid& grid) {
    for (std::size_t d = 0; d < grid.dim; ++d) os << "u_" << (d + 1) << ',';
    os << "value\n";
    const std::size_t side = grid.resolution + 1;
    std::vector<std::size_t> index(grid.dim, 0);
    for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
        std::size_t rem = flat;
        for (std::size_t d = grid.dim; d-- > 0;) {
            index[d] = rem % side;
            rem /= side;
        }
        for (std::size_t d = 0; d < grid.dim; ++d) {
            os << detail::format_double(static_cast<double>(index[d]) /
                                        static_cast<double>(grid.resolution))
               << ',';
        }
        os << detail::format_double(grid.values[flat]) << '\n';
    }
}

inline void write_grid_csv(const std::string& path, const EmpiricalCopulaGrid& grid) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_grid_csv(os, grid);
    if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace hcopula
