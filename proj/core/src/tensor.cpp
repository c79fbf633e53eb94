#include "srl/tensor.hpp"

#include <cmath>
#include <numeric>

#include "srl/common.hpp"

namespace srl {

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (int d : shape_) {
        require(d >= 0, "tensor dimension must be nonnegative, got ", d);
        n *= static_cast<std::size_t>(d);
    }
    data_.assign(n, 0.0f);
}

Tensor Tensor::zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<int> shape, double value) {
    Tensor t(std::move(shape));
    t.fill(value);
    return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
    Tensor t(std::move(shape));
    require(t.size() == values.size(), "tensor data length ", values.size(),
            " does not match shape ", t.shape_str());
    t.data_ = std::move(values);
    return t;
}

Tensor Tensor::scalar(double value) { return from({1}, {value}); }

int Tensor::rows() const {
    require(rank() == 2, "rows() requires a rank-2 tensor, got shape ", shape_str());
    return shape_[0];
}

int Tensor::cols() const {
    require(rank() == 2, "cols() requires a rank-2 tensor, got shape ", shape_str());
    return shape_[1];
}

double Tensor::item() const {
    require(size() == 1, "item() requires a size-1 tensor, got shape ", shape_str());
    return data_[0];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string Tensor::shape_str() const { return srl::shape_str(shape_); }

std::string shape_str(const std::vector<int>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

int argmax(const Tensor& v) {
    require(v.rank() == 1 && v.size() > 0, "argmax requires a nonempty vector");
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v.at(i) > v.at(best)) best = i;
    }
    return best;
}

int argmax_row(const Tensor& m, int row) {
    require(m.rank() == 2 && m.cols() > 0, "argmax_row requires a nonempty matrix");
    int best = 0;
    for (int j = 1; j < m.cols(); ++j) {
        if (m.at(row, j) > m.at(row, best)) best = j;
    }
    return best;
}

}  // namespace srl
