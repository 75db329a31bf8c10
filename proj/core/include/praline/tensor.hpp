#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace praline {

// Dense row-major matrix of doubles. All model math runs in 64-bit so that
// analytic gradients can be checked against central finite differences and
// checkpoints round-trip bit-exactly.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double* row(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }
    const double* row(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }

    double& at(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    void zero() { std::fill(data.begin(), data.end(), 0.0); }

    bool all_finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

using Vec = std::vector<double>;

// C = A * B, A: n x k, B: k x m
Mat matmul(const Mat& a, const Mat& b);
// C = A * B^T, A: n x k, B: m x k
Mat matmul_nt(const Mat& a, const Mat& b);
// C = A^T * B, A: k x n, B: k x m
Mat matmul_tn(const Mat& a, const Mat& b);

void add_inplace(Mat& a, const Mat& b);
void axpy_inplace(Mat& a, double alpha, const Mat& b); // a += alpha * b
void scale_inplace(Mat& a, double alpha);

// Row-wise softmax, numerically stabilised by the row max.
void softmax_rows_inplace(Mat& m);
// Backward of row-wise softmax: given probs p and upstream dp, returns dlogits.
Mat softmax_rows_backward(const Mat& probs, const Mat& dprobs);

inline double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

double cosine(std::span<const double> a, std::span<const double> b);

void softmax_inplace(Vec& v);

} // namespace praline
