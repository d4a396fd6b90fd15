#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace cvqd::qsim {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Sized for single gates and <= 3-qubit channels.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix data size mismatch");
    }

    static Matrix identity(std::size_t dim) {
        Matrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<cplx>& data() const { return data_; }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    Matrix conj() const {
        Matrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
        return out;
    }

    cplx trace() const {
        cplx t = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw std::invalid_argument("matrix shape mismatch");
        Matrix out(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = 0; k < cols_; ++k) {
                const cplx v = (*this)(r, k);
                if (v == cplx{}) continue;
                for (std::size_t c = 0; c < o.cols_; ++c) out(r, c) += v * o(k, c);
            }
        return out;
    }

    Matrix operator+(const Matrix& o) const {
        check_same(o);
        Matrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] += o.data_[i];
        return out;
    }

    Matrix operator-(const Matrix& o) const {
        check_same(o);
        Matrix out = *this;
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= o.data_[i];
        return out;
    }

    Matrix operator*(cplx s) const {
        Matrix out = *this;
        for (auto& v : out.data_) v *= s;
        return out;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

// Max |a - e^{i phi} b| after aligning phase on the largest entry of b.
inline double distance_up_to_phase(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
    std::size_t best = 0;
    for (std::size_t i = 0; i < b.data().size(); ++i)
        if (std::abs(b.data()[i]) > std::abs(b.data()[best])) best = i;
    if (std::abs(b.data()[best]) == 0.0) return a.max_abs();
    cplx phase = a.data()[best] / b.data()[best];
    if (std::abs(phase) == 0.0) return a.max_abs() + b.max_abs();
    phase /= std::abs(phase);
    return (a - b * phase).max_abs();
}

namespace gates {

inline Matrix mat2(cplx a, cplx b, cplx c, cplx d) { return Matrix(2, 2, {a, b, c, d}); }

inline Matrix I() { return Matrix::identity(2); }
inline Matrix X() { return mat2(0, 1, 1, 0); }
inline Matrix Y() { return mat2(0, cplx(0, -1), cplx(0, 1), 0); }
inline Matrix Z() { return mat2(1, 0, 0, -1); }
inline Matrix H() {
    const double r = 1.0 / std::sqrt(2.0);
    return mat2(r, r, r, -r);
}
inline Matrix S() { return mat2(1, 0, 0, cplx(0, 1)); }
inline Matrix Sdg() { return mat2(1, 0, 0, cplx(0, -1)); }
inline Matrix T() { return mat2(1, 0, 0, std::polar(1.0, std::numbers::pi / 4)); }
inline Matrix Tdg() { return mat2(1, 0, 0, std::polar(1.0, -std::numbers::pi / 4)); }

// Basis order |t0 t1> with t0 the high bit.
inline Matrix CNOT() {
    Matrix m(4, 4);
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    return m;
}

inline Matrix power(const Matrix& m, int k) {
    Matrix out = Matrix::identity(m.rows());
    for (int i = 0; i < k; ++i) out = out * m;
    return out;
}

} // namespace gates

} // namespace cvqd::qsim
