#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace srl {

// Dense row-major float64 value. Rank 1 (vectors) and rank 2 (matrices)
// cover everything the models need; a size-1 rank-1 tensor doubles as a
// scalar. Tensors are plain values: copy freely, never aliased.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<int> shape);

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, double value);
    static Tensor from(std::vector<int> shape, std::vector<double> values);
    static Tensor scalar(double value);

    int rank() const { return static_cast<int>(shape_.size()); }
    int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
    int rows() const;
    int cols() const;
    std::size_t size() const { return data_.size(); }
    const std::vector<int>& shape() const { return shape_; }
    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    std::string shape_str() const;

    double& at(int i) { return data_[static_cast<std::size_t>(i)]; }
    double at(int i) const { return data_[static_cast<std::size_t>(i)]; }
    double& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols() + j]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols() + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double item() const;
    bool all_finite() const;
    void fill(double value);

    bool operator==(const Tensor& other) const {
        return shape_ == other.shape_ && data_ == other.data_;
    }

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

std::string shape_str(const std::vector<int>& shape);

// Index of the largest entry; ties break toward the lowest index.
int argmax(const Tensor& v);
int argmax_row(const Tensor& m, int row);

}  // namespace srl
