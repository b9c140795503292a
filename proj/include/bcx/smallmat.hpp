#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bcx {

// Small dense row-major matrix.  Sized for per-mode blocks (3x3) and their
// augmented companions (up to 9x9); not meant for large linear algebra.
class Mat {
public:
    Mat() = default;
    Mat(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols, 0.0) {}

    static Mat identity(int n);

    int rows() const { return r_; }
    int cols() const { return c_; }

    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }

    Mat operator*(const Mat& b) const;
    Mat operator+(const Mat& b) const;
    Mat operator-(const Mat& b) const;
    Mat scaled(double s) const;

    void apply(std::span<const double> x, std::span<double> y) const; // y = A x

    double norm_inf() const; // max row sum
    double norm_1() const;   // max col sum

    Mat block(int i0, int j0, int rows, int cols) const;

private:
    int r_ = 0, c_ = 0;
    std::vector<double> a_;
};

// LU factorization with partial pivoting; throws NumericalError on exact
// singularity.
class Lu {
public:
    explicit Lu(Mat a);
    std::vector<double> solve(std::span<const double> b) const;
    Mat solve(const Mat& b) const;
    Mat inverse() const;
    double det() const;

private:
    Mat lu_;
    std::vector<int> piv_;
    int sign_ = 1;
};

// 1-norm condition number estimate (exact inverse, fine at these sizes).
double cond_1(const Mat& a);

// Matrix exponential by Pade(13) scaling and squaring (Higham 2005).
// Exact (to roundoff) on nilpotent blocks such as the Neumann zero mode.
Mat expm(const Mat& a);

} // namespace bcx
