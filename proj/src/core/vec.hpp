#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace slg {

using Vec = std::vector<double>;
using Span = std::span<const double>;

inline double dot(Span a, Span b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double nrm2_sq(Span a) { return dot(a, a); }
inline double nrm2(Span a) { return std::sqrt(nrm2_sq(a)); }

inline void axpy(double c, Span x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(double c, std::span<double> x) {
    for (double& v : x) v *= c;
}

inline bool all_finite(Span a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// Dense square matrix, row-major. Small: state dimension is N*d <= a few dozen.
class Mat {
public:
    Mat() = default;
    explicit Mat(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}
    Mat(int rows, int cols) : n_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return n_; }
    int cols() const { return cols_ > 0 ? cols_ : n_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols() + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols() + j]; }

    const double* data() const { return a_.data(); }
    double* data() { return a_.data(); }

    void resize(int n) {
        n_ = n;
        cols_ = 0;
        a_.assign(static_cast<std::size_t>(n) * n, 0.0);
    }
    void set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

    // y = A x
    void matvec(Span x, std::span<double> y) const {
        const int m = rows(), c = cols();
        for (int i = 0; i < m; ++i) {
            double s = 0.0;
            for (int j = 0; j < c; ++j) s += (*this)(i, j) * x[j];
            y[i] = s;
        }
    }

    double frobenius() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < rows(); ++i)
            for (int j = i + 1; j < cols(); ++j)
                m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

private:
    int n_ = 0;
    int cols_ = 0;  // 0 means square
    std::vector<double> a_;
};

// log(exp(a) + exp(b)) without overflow
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

// log(exp(a) - exp(b)), requires a >= b
inline double log_sub(double a, double b) {
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) throw std::domain_error("log_sub: negative difference");
    if (a == b) return -std::numeric_limits<double>::infinity();
    return a + std::log1p(-std::exp(b - a));
}

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct SamplingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StepError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PathError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace slg
