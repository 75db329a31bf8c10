#include "praline/tensor.hpp"

#include <algorithm>

namespace praline {

Mat matmul(const Mat& a, const Mat& b) {
    assert(a.cols == b.rows);
    Mat c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (int l = 0; l < a.cols; ++l) {
            const double av = arow[l];
            if (av == 0.0) continue;
            const double* brow = b.row(l);
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
    assert(a.cols == b.cols);
    Mat c(a.rows, b.rows);
    for (int i = 0; i < a.rows; ++i) {
        const double* arow = a.row(i);
        double* crow = c.row(i);
        for (int j = 0; j < b.rows; ++j) {
            const double* brow = b.row(j);
            double s = 0.0;
            for (int l = 0; l < a.cols; ++l) s += arow[l] * brow[l];
            crow[j] = s;
        }
    }
    return c;
}

Mat matmul_tn(const Mat& a, const Mat& b) {
    assert(a.rows == b.rows);
    Mat c(a.cols, b.cols);
    for (int l = 0; l < a.rows; ++l) {
        const double* arow = a.row(l);
        const double* brow = b.row(l);
        for (int i = 0; i < a.cols; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c.row(i);
            for (int j = 0; j < b.cols; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

void add_inplace(Mat& a, const Mat& b) {
    assert(a.rows == b.rows && a.cols == b.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void axpy_inplace(Mat& a, double alpha, const Mat& b) {
    assert(a.rows == b.rows && a.cols == b.cols);
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += alpha * b.data[i];
}

void scale_inplace(Mat& a, double alpha) {
    for (double& v : a.data) v *= alpha;
}

void softmax_rows_inplace(Mat& m) {
    for (int i = 0; i < m.rows; ++i) {
        double* r = m.row(i);
        double mx = r[0];
        for (int j = 1; j < m.cols; ++j) mx = std::max(mx, r[j]);
        double sum = 0.0;
        for (int j = 0; j < m.cols; ++j) {
            r[j] = std::exp(r[j] - mx);
            sum += r[j];
        }
        for (int j = 0; j < m.cols; ++j) r[j] /= sum;
    }
}

Mat softmax_rows_backward(const Mat& probs, const Mat& dprobs) {
    Mat dl(probs.rows, probs.cols);
    for (int i = 0; i < probs.rows; ++i) {
        const double* p = probs.row(i);
        const double* dp = dprobs.row(i);
        double inner = 0.0;
        for (int j = 0; j < probs.cols; ++j) inner += dp[j] * p[j];
        double* d = dl.row(i);
        for (int j = 0; j < probs.cols; ++j) d[j] = p[j] * (dp[j] - inner);
    }
    return dl;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    assert(na > 0.0 && nb > 0.0);
    return dot(a, b) / (na * nb);
}

void softmax_inplace(Vec& v) {
    double mx = v[0];
    for (double x : v) mx = std::max(mx, x);
    double sum = 0.0;
    for (double& x : v) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : v) x /= sum;
}

} // namespace praline
