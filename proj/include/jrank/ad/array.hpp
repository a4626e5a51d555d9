#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace jrank::ad {

/// Dense row-major matrix of doubles. Vectors are n x 1 or 1 x n, scalars 1 x 1.
class Array {
public:
    Array() = default;
    Array(std::size_t rows, std::size_t cols, double fill = 0.0);
    Array(std::size_t rows, std::size_t cols, std::vector<double> data);
    Array(std::initializer_list<std::initializer_list<double>> rows);

    static Array scalar(double v) { return Array(1, 1, v); }
    static Array column(std::span<const double> v);
    static Array row(std::span<const double> v);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_scalar() const noexcept { return rows_ == 1 && cols_ == 1; }
    bool same_shape(const Array& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    /// Value of a 1 x 1 array.
    double item() const;

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }
    std::span<const double> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    void fill(double v);
    bool all_finite() const noexcept;

    /// "(rows x cols)" for diagnostics.
    std::string shape_string() const;

    friend bool operator==(const Array&, const Array&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace jrank::ad
