#include "cooperad/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace cooperad {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

bool Matrix::isZero() const {
    for (const auto& x : data_)
        if (x != 0) return false;
    return true;
}

bool Matrix::operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix add: shape mismatch");
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix sub: shape mismatch");
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols_ != o.rows_) throw std::invalid_argument("matrix mul: shape mismatch");
    Matrix r(rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const Rational& a = at(i, k);
            if (a == 0) continue;
            for (int j = 0; j < o.cols_; ++j) {
                const Rational& b = o.at(k, j);
                if (b != 0) r.at(i, j) += a * b;
            }
        }
    return r;
}

Matrix Matrix::operator*(const Rational& s) const {
    Matrix r(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * s;
    return r;
}

Matrix Matrix::transpose() const {
    Matrix r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

Matrix Matrix::hcat(const std::vector<Matrix>& parts) {
    if (parts.empty()) return Matrix();
    int rows = parts[0].rows();
    int cols = 0;
    for (const auto& p : parts) {
        if (p.rows() != rows) throw std::invalid_argument("hcat: row mismatch");
        cols += p.cols();
    }
    Matrix r(rows, cols);
    int off = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < p.cols(); ++j) r.at(i, off + j) = p.at(i, j);
        off += p.cols();
    }
    return r;
}

Matrix Matrix::vcat(const std::vector<Matrix>& parts) {
    if (parts.empty()) return Matrix();
    int cols = parts[0].cols();
    int rows = 0;
    for (const auto& p : parts) {
        if (p.cols() != cols) throw std::invalid_argument("vcat: col mismatch");
        rows += p.rows();
    }
    Matrix r(rows, cols);
    int off = 0;
    for (const auto& p : parts) {
        for (int i = 0; i < p.rows(); ++i)
            for (int j = 0; j < cols; ++j) r.at(off + i, j) = p.at(i, j);
        off += p.rows();
    }
    return r;
}

Matrix Matrix::submatrixCols(const std::vector<int>& colIdx) const {
    Matrix r(rows_, static_cast<int>(colIdx.size()));
    for (int j = 0; j < static_cast<int>(colIdx.size()); ++j)
        for (int i = 0; i < rows_; ++i) r.at(i, j) = at(i, colIdx[j]);
    return r;
}

namespace {

// Row echelon (in place); returns pivot (row, col) pairs, scanning columns
// left to right. First nonzero entry in the remaining rows serves as pivot.
std::vector<std::pair<int, int>> echelon(Matrix& m) {
    std::vector<std::pair<int, int>> pivots;
    int row = 0;
    for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
        int p = -1;
        for (int i = row; i < m.rows(); ++i)
            if (m.at(i, col) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != row)
            for (int j = 0; j < m.cols(); ++j) std::swap(m.at(p, j), m.at(row, j));
        Rational inv = 1 / m.at(row, col);
        for (int j = col; j < m.cols(); ++j) m.at(row, j) *= inv;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == row || m.at(i, col) == 0) continue;
            Rational f = m.at(i, col);
            for (int j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
        }
        pivots.emplace_back(row, col);
        ++row;
    }
    return pivots;
}

} // namespace

int Matrix::rank() const {
    Matrix m = *this;
    return static_cast<int>(echelon(m).size());
}

std::vector<int> Matrix::pivotColumns() const {
    Matrix m = *this;
    std::vector<int> cols;
    for (auto& [r, c] : echelon(m)) cols.push_back(c);
    return cols;
}

Matrix Matrix::kernelBasis() const {
    Matrix m = *this;
    auto pivots = echelon(m);
    std::vector<bool> isPivot(cols_, false);
    for (auto& [r, c] : pivots) isPivot[c] = true;
    std::vector<int> freeCols;
    for (int c = 0; c < cols_; ++c)
        if (!isPivot[c]) freeCols.push_back(c);
    Matrix basis(cols_, static_cast<int>(freeCols.size()));
    for (int k = 0; k < static_cast<int>(freeCols.size()); ++k) {
        int fc = freeCols[k];
        basis.at(fc, k) = 1;
        for (auto& [r, c] : pivots) basis.at(c, k) = -m.at(r, fc);
    }
    return basis;
}

std::optional<Matrix> Matrix::solve(const Matrix& b) const {
    if (b.rows() != rows_) throw std::invalid_argument("solve: shape mismatch");
    Matrix aug = hcat({*this, b});
    auto pivots = echelon(aug);
    // Inconsistent if a pivot lands in the b-block.
    for (auto& [r, c] : pivots)
        if (c >= cols_) return std::nullopt;
    Matrix x(cols_, b.cols());
    for (auto& [r, c] : pivots)
        for (int j = 0; j < b.cols(); ++j) x.at(c, j) = aug.at(r, cols_ + j);
    return x;
}

std::optional<Matrix> Matrix::inverse() const {
    if (rows_ != cols_) return std::nullopt;
    auto x = solve(identity(rows_));
    if (!x) return std::nullopt;
    // solve() gives a right inverse candidate; for square full-rank it is the inverse.
    if ((*this) * (*x) != identity(rows_)) return std::nullopt;
    return x;
}

std::string Matrix::str() const {
    std::ostringstream os;
    os << rows_ << "x" << cols_ << "[";
    for (int i = 0; i < rows_; ++i) {
        if (i) os << "; ";
        for (int j = 0; j < cols_; ++j) {
            if (j) os << ",";
            os << at(i, j).get_str();
        }
    }
    os << "]";
    return os.str();
}

} // namespace cooperad
