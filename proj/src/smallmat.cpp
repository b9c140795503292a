#include "bcx/smallmat.hpp"

#include "bcx/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bcx {

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::operator*(const Mat& b) const {
    Mat out(r_, b.c_);
    for (int i = 0; i < r_; ++i) {
        for (int k = 0; k < c_; ++k) {
            const double aik = (*this)(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.c_; ++j) out(i, j) += aik * b(k, j);
        }
    }
    return out;
}

Mat Mat::operator+(const Mat& b) const {
    Mat out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] += b.a_[i];
    return out;
}

Mat Mat::operator-(const Mat& b) const {
    Mat out = *this;
    for (size_t i = 0; i < a_.size(); ++i) out.a_[i] -= b.a_[i];
    return out;
}

Mat Mat::scaled(double s) const {
    Mat out = *this;
    for (double& v : out.a_) v *= s;
    return out;
}

void Mat::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        for (int j = 0; j < c_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
}

double Mat::norm_inf() const {
    double m = 0.0;
    for (int i = 0; i < r_; ++i) {
        double s = 0.0;
        for (int j = 0; j < c_; ++j) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double Mat::norm_1() const {
    double m = 0.0;
    for (int j = 0; j < c_; ++j) {
        double s = 0.0;
        for (int i = 0; i < r_; ++i) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

Mat Mat::block(int i0, int j0, int rows, int cols) const {
    Mat out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out(i, j) = (*this)(i0 + i, j0 + j);
    return out;
}

Lu::Lu(Mat a) : lu_(std::move(a)), piv_(lu_.rows()) {
    const int n = lu_.rows();
    for (int i = 0; i < n; ++i) piv_[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
        if (lu_(p, k) == 0.0) throw NumericalError("Lu: singular matrix");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
            std::swap(piv_[p], piv_[k]);
            sign_ = -sign_;
        }
        for (int i = k + 1; i < n; ++i) {
            lu_(i, k) /= lu_(k, k);
            const double m = lu_(i, k);
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

std::vector<double> Lu::solve(std::span<const double> b) const {
    const int n = lu_.rows();
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv_[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

Mat Lu::solve(const Mat& b) const {
    const int n = lu_.rows();
    Mat out(n, b.cols());
    std::vector<double> col(n);
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < n; ++i) col[i] = b(i, j);
        auto x = solve(col);
        for (int i = 0; i < n; ++i) out(i, j) = x[i];
    }
    return out;
}

Mat Lu::inverse() const { return solve(Mat::identity(lu_.rows())); }

double Lu::det() const {
    double d = sign_;
    for (int i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
    return d;
}

double cond_1(const Mat& a) {
    Lu lu(a);
    return a.norm_1() * lu.inverse().norm_1();
}

Mat expm(const Mat& a) {
    // Pade(13) coefficients.
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const int n = a.rows();

    const double nrm = a.norm_1();
    int s = 0;
    const double theta13 = 5.371920351148152;
    if (nrm > theta13) {
        s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    }
    const Mat as = a.scaled(std::ldexp(1.0, -s));

    const Mat a2 = as * as;
    const Mat a4 = a2 * a2;
    const Mat a6 = a2 * a4;
    const Mat id = Mat::identity(n);

    // U = A (A6 (b13 A6 + b11 A4 + b9 A2) + b7 A6 + b5 A4 + b3 A2 + b1 I)
    Mat u_in = a6.scaled(b[13]) + a4.scaled(b[11]) + a2.scaled(b[9]);
    Mat u = as * (a6 * u_in + a6.scaled(b[7]) + a4.scaled(b[5]) + a2.scaled(b[3]) + id.scaled(b[1]));
    // V = A6 (b12 A6 + b10 A4 + b8 A2) + b6 A6 + b4 A4 + b2 A2 + b0 I
    Mat v_in = a6.scaled(b[12]) + a4.scaled(b[10]) + a2.scaled(b[8]);
    Mat v = a6 * v_in + a6.scaled(b[6]) + a4.scaled(b[4]) + a2.scaled(b[2]) + id.scaled(b[0]);

    Mat r = Lu(v - u).solve(v + u);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

} // namespace bcx
