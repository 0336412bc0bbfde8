#pragma once

#include "cooperad/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace cooperad {

// Dense rational matrix. Instances in this library stay tiny (a few hundred
// rows at the largest acceptance case), so everything is straightforward
// Gaussian elimination with exact pivots.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols) {}

    static Matrix identity(int n);
    static Matrix zero(int rows, int cols) { return Matrix(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    Rational& at(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const Rational& at(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    bool isZero() const;
    bool operator==(const Matrix& o) const;
    bool operator!=(const Matrix& o) const { return !(*this == o); }

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const Matrix& o) const;
    Matrix operator*(const Rational& s) const;
    Matrix transpose() const;

    // Columns of `cols` stacked side by side.
    static Matrix hcat(const std::vector<Matrix>& parts);
    static Matrix vcat(const std::vector<Matrix>& parts);

    Matrix submatrixCols(const std::vector<int>& colIdx) const;

    int rank() const;
    // Basis of the null space, as columns.
    Matrix kernelBasis() const;
    // Indices of pivot columns of the column echelon form, scanning columns
    // left to right (deterministic; part of the canonical-basis contract).
    std::vector<int> pivotColumns() const;

    // Solve A * X = B exactly; nullopt when inconsistent. When the solution
    // is not unique the free variables are set to zero (callers in this
    // library only use it where the solution is unique).
    std::optional<Matrix> solve(const Matrix& b) const;

    std::optional<Matrix> inverse() const;

    std::string str() const;

private:
    int rows_, cols_;
    std::vector<Rational> data_;
};

} // namespace cooperad
