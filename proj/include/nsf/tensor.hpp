#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

// Small fixed-capacity vector/matrix types for spatial dimension 1 or 2.
// All phase-space and field arithmetic runs through these; they are value
// types with no heap traffic.

namespace nsf {

class Vec {
public:
    Vec() : n_(0), v_{0.0, 0.0} {}
    explicit Vec(int n) : n_(n), v_{0.0, 0.0} { check_dim(n); }
    Vec(int n, double x0, double x1) : n_(n), v_{x0, x1} { check_dim(n); }

    static Vec zero(int n) { return Vec(n); }
    static Vec of(double x) { return Vec(1, x, 0.0); }
    static Vec of(double x, double y) { return Vec(2, x, y); }

    int dim() const { return n_; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] += o[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] -= o[i];
        return *this;
    }
    Vec& operator*=(double a) {
        for (int i = 0; i < n_; ++i) v_[static_cast<std::size_t>(i)] *= a;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double a, Vec v) { return v *= a; }
    friend Vec operator*(Vec v, double a) { return v *= a; }
    friend Vec operator-(Vec v) { return v *= -1.0; }

    friend double dot(const Vec& a, const Vec& b) {
        double s = 0.0;
        for (int i = 0; i < a.n_; ++i) s += a[i] * b[i];
        return s;
    }
    double norm2() const { return dot(*this, *this); }
    double norm() const { return std::sqrt(norm2()); }

private:
    static void check_dim(int n) {
        if (n < 1 || n > 2) throw std::invalid_argument("Vec: dimension must be 1 or 2");
    }
    int n_;
    std::array<double, 2> v_;
};

class Mat {
public:
    Mat() : n_(0), a_{0.0, 0.0, 0.0, 0.0} {}
    explicit Mat(int n) : n_(n), a_{0.0, 0.0, 0.0, 0.0} { check_dim(n); }

    static Mat zero(int n) { return Mat(n); }
    static Mat identity(int n) {
        Mat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat diag(double a, double b) {
        Mat m(2);
        m(0, 0) = a;
        m(1, 1) = b;
        return m;
    }
    static Mat of1(double a) {
        Mat m(1);
        m(0, 0) = a;
        return m;
    }
    static Mat of2(double a00, double a01, double a10, double a11) {
        Mat m(2);
        m(0, 0) = a00;
        m(0, 1) = a01;
        m(1, 0) = a10;
        m(1, 1) = a11;
        return m;
    }
    static Mat outer(const Vec& a, const Vec& b) {
        Mat m(a.dim());
        for (int i = 0; i < a.dim(); ++i)
            for (int j = 0; j < a.dim(); ++j) m(i, j) = a[i] * b[j];
        return m;
    }

    int dim() const { return n_; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * 2 + j)]; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * 2 + j)]; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    Mat& operator*=(double a) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) *= a;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(double a, Mat m) { return m *= a; }
    friend Mat operator*(Mat m, double a) { return m *= a; }
    friend Mat operator-(Mat m) { return m *= -1.0; }

    Mat transpose() const {
        Mat m(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = (*this)(j, i);
        return m;
    }
    double trace() const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    friend Vec operator*(const Mat& m, const Vec& v) {
        Vec r(m.n_);
        for (int i = 0; i < m.n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < m.n_; ++j) s += m(i, j) * v[j];
            r[i] = s;
        }
        return r;
    }

    // Frobenius inner product A:B.
    friend double ddot(const Mat& a, const Mat& b) {
        double s = 0.0;
        for (int i = 0; i < a.n_; ++i)
            for (int j = 0; j < a.n_; ++j) s += a(i, j) * b(i, j);
        return s;
    }
    double norm2() const { return ddot(*this, *this); }

private:
    static void check_dim(int n) {
        if (n < 1 || n > 2) throw std::invalid_argument("Mat: dimension must be 1 or 2");
    }
    int n_;
    std::array<double, 4> a_;
};

// T[A] = A + A^t - (2/N) tr(A) I.  Always trace-free; the centerpiece of the
// viscous dissipation algebra.  In 1D it vanishes identically.
inline Mat traceless_part(const Mat& a) {
    const int n = a.dim();
    Mat r = a + a.transpose();
    const double t = (2.0 / n) * a.trace();
    for (int i = 0; i < n; ++i) r(i, i) -= t;
    return r;
}

inline Mat sym(const Mat& a) {
    Mat r = a + a.transpose();
    return r *= 0.5;
}

}  // namespace nsf
