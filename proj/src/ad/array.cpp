#include "jrank/ad/array.hpp"

#include "jrank/error.hpp"

#include <algorithm>
#include <cmath>

namespace jrank::ad {

Array::Array(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Array::Array(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        throw ShapeError("Array: " + std::to_string(data_.size()) + " values do not fill (" +
                         std::to_string(rows) + "x" + std::to_string(cols) + ")");
    }
}

Array::Array(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("Array: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Array Array::column(std::span<const double> v) {
    return Array(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Array Array::row(std::span<const double> v) {
    return Array(1, v.size(), std::vector<double>(v.begin(), v.end()));
}

double Array::item() const {
    if (!is_scalar()) throw ShapeError("item: expected (1x1), got " + shape_string());
    return data_[0];
}

void Array::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Array::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Array::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

} // namespace jrank::ad
