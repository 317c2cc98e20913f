#pragma once

#include <cstddef>
#include <vector>

namespace klucb {

// Dense square matrix, row major.  Deliberately tiny: transition matrices in
// this library have at most a few dozen states.
class Matrix {
  public:
    Matrix() : n_(0) {}
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    std::size_t size() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    bool operator==(const Matrix& other) const = default;

  private:
    std::size_t n_;
    std::vector<double> a_;
};

// y = M x
inline void mat_vec(const Matrix& m, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = m.size();
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * x[j];
        y[i] = acc;
    }
}

// y = M^T x
inline void mat_tvec(const Matrix& m, const std::vector<double>& x, std::vector<double>& y) {
    const std::size_t n = m.size();
    y.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double xj = x[j];
        for (std::size_t i = 0; i < n; ++i) y[i] += m(j, i) * xj;
    }
}

inline double l1_norm(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v < 0 ? -v : v;
    return s;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace klucb
