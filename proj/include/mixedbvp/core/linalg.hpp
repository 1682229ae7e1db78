#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>
#include <string>

#include "mixedbvp/core/error.hpp"

namespace mixedbvp {

inline void check_dim(int dim) {
    require(dim == 2 || dim == 3, ErrorCode::InvalidArgument,
            "dimension must be 2 or 3, got " + std::to_string(dim));
}

/// Small vector in R^2 or R^3 (points, gradients, directions).
class Vec {
public:
    Vec() : Vec(2) {}
    explicit Vec(int dim) : dim_(dim) { check_dim(dim); }
    Vec(std::initializer_list<double> xs) : dim_(static_cast<int>(xs.size())) {
        check_dim(dim_);
        int i = 0;
        for (double x : xs) c_[i++] = x;
    }

    int dim() const noexcept { return dim_; }
    double& operator[](int i) { assert(i >= 0 && i < dim_); return c_[i]; }
    double operator[](int i) const { assert(i >= 0 && i < dim_); return c_[i]; }

    Vec& operator+=(const Vec& o) { for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i]; return *this; }
    Vec& operator-=(const Vec& o) { for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i]; return *this; }
    Vec& operator*=(double s) { for (int i = 0; i < dim_; ++i) c_[i] *= s; return *this; }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

private:
    std::array<double, 3> c_{};
    int dim_;
};

inline double dot(const Vec& a, const Vec& b) {
    assert(a.dim() == b.dim());
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Symmetric matrix of dimension 2 or 3; only the upper triangle is stored.
class SymMatrix {
public:
    SymMatrix() : SymMatrix(2) {}
    explicit SymMatrix(int dim) : dim_(dim) { check_dim(dim); }

    static SymMatrix identity(int dim) {
        SymMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
        return m;
    }

    static SymMatrix diag(std::initializer_list<double> d) {
        SymMatrix m(static_cast<int>(d.size()));
        int i = 0;
        for (double x : d) { m.set(i, i, x); ++i; }
        return m;
    }

    /// Builds from a full row-major matrix; the lower triangle is ignored.
    static SymMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        SymMatrix m(static_cast<int>(rows.size()));
        int i = 0;
        for (const auto& row : rows) {
            int j = 0;
            for (double x : row) {
                if (j >= i) m.set(i, j, x);
                ++j;
            }
            ++i;
        }
        return m;
    }

    /// v v^T
    static SymMatrix outer(const Vec& v) {
        SymMatrix m(v.dim());
        for (int i = 0; i < v.dim(); ++i)
            for (int j = i; j < v.dim(); ++j) m.set(i, j, v[i] * v[j]);
        return m;
    }

    /// u v^T + v u^T
    static SymMatrix sym_outer(const Vec& u, const Vec& v) {
        SymMatrix m(u.dim());
        for (int i = 0; i < u.dim(); ++i)
            for (int j = i; j < u.dim(); ++j) m.set(i, j, u[i] * v[j] + v[i] * u[j]);
        return m;
    }

    int dim() const noexcept { return dim_; }

    double operator()(int i, int j) const {
        assert(i >= 0 && j >= 0 && i < dim_ && j < dim_);
        return i <= j ? u_[index(i, j)] : u_[index(j, i)];
    }

    void set(int i, int j, double x) {
        assert(i >= 0 && j >= 0 && i < dim_ && j < dim_);
        if (i <= j) u_[index(i, j)] = x; else u_[index(j, i)] = x;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    /// Frobenius norm.
    double frobenius() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    /// e^T M e
    double quadratic_form(const Vec& e) const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) s += e[i] * (*this)(i, j) * e[j];
        return s;
    }

    Vec operator*(const Vec& v) const {
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    SymMatrix& operator+=(const SymMatrix& o) { for (int k = 0; k < 6; ++k) u_[k] += o.u_[k]; return *this; }
    SymMatrix& operator-=(const SymMatrix& o) { for (int k = 0; k < 6; ++k) u_[k] -= o.u_[k]; return *this; }
    SymMatrix& operator*=(double s) { for (double& x : u_) x *= s; return *this; }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
    friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

    friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
        return a.dim_ == b.dim_ && a.u_ == b.u_;
    }

private:
    // Packed upper triangle, row by row: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
    static constexpr int index(int i, int j) {
        return i * (7 - i) / 2 + (j - i);
    }

    std::array<double, 6> u_{};
    int dim_;
};

/// Dense square matrix (Jacobians of diffeomorphisms, rotations).
class Mat {
public:
    Mat() : Mat(2) {}
    explicit Mat(int dim) : dim_(dim) { check_dim(dim); }

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        Mat m(static_cast<int>(rows.size()));
        int i = 0;
        for (const auto& row : rows) {
            int j = 0;
            for (double x : row) m(i, j++) = x;
            ++i;
        }
        return m;
    }

    int dim() const noexcept { return dim_; }
    double& operator()(int i, int j) { return a_[i * 3 + j]; }
    double operator()(int i, int j) const { return a_[i * 3 + j]; }

    Mat transpose() const {
        Mat t(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    double determinant() const {
        const Mat& m = *this;
        if (dim_ == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
             - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
             + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }

    Vec operator*(const Vec& v) const {
        Vec r(dim_);
        for (int i = 0; i < dim_; ++i) {
            double s = 0.0;
            for (int j = 0; j < dim_; ++j) s += (*this)(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    friend Mat operator*(const Mat& x, const Mat& y) {
        Mat r(x.dim_);
        for (int i = 0; i < x.dim_; ++i)
            for (int j = 0; j < x.dim_; ++j) {
                double s = 0.0;
                for (int k = 0; k < x.dim_; ++k) s += x(i, k) * y(k, j);
                r(i, j) = s;
            }
        return r;
    }

private:
    std::array<double, 9> a_{};
    int dim_;
};

/// J^T M J, symmetrized.
inline SymMatrix congruence(const Mat& jac, const SymMatrix& m) {
    const int n = m.dim();
    SymMatrix r(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) s += jac(k, i) * m(k, l) * jac(l, j);
            r.set(i, j, s);
        }
    return r;
}

} // namespace mixedbvp
