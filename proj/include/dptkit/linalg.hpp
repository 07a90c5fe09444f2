// linalg.hpp
// Dense complex matrices and a Hermitian eigensolver for small systems.
//
// Everything here is sized for operators of dimension <= ~64. The eigensolver
// runs cyclic Jacobi rotations on the real symmetric embedding
//   H = A + iB  ->  [[A, -B], [B, A]]
// whose spectrum is the spectrum of H with every eigenvalue doubled. A pivoted
// complex Gram-Schmidt pass then picks n orthonormal complex eigenvectors out of
// the 2n real ones.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dptkit/errors.hpp"

namespace dptkit {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

// Eigenvalues below this are treated as zero when forming square roots,
// generalized inverses and supports.
inline constexpr double kEigenCutoff = 1e-12;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw DimensionError("ComplexMatrix: entry count " + std::to_string(data_.size()) +
                                 " does not match " + std::to_string(rows_) + "x" +
                                 std::to_string(cols_));
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw DomainError("ComplexMatrix: non-finite entry");
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix column(std::span<const cplx> v) {
        return ComplexMatrix(v.size(), 1, std::vector<cplx>(v.begin(), v.end()));
    }

    static ComplexMatrix diagonal(std::span<const double> d) {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    // |v><v|
    static ComplexMatrix outer(std::span<const cplx> v) {
        ComplexMatrix m(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    std::span<const cplx> entries() const noexcept { return data_; }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept {
        return data_[r * cols_ + c];
    }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
        return out;
    }

    cplx trace() const {
        require_square("trace");
        cplx t{0.0, 0.0};
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    bool is_hermitian(double tol) const {
        if (!square()) return false;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = r; c < cols_; ++c)
                if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
        return true;
    }

    // (M + M^dagger) / 2
    ComplexMatrix hermitian_part() const {
        require_square("hermitian_part");
        ComplexMatrix out(rows_, cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(r, c) = 0.5 * ((*this)(r, c) + std::conj((*this)(c, r)));
        return out;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMatrix& operator*=(cplx s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("matrix product: inner dimensions " + std::to_string(a.cols_) +
                                 " and " + std::to_string(b.rows_) + " differ");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx ark = a(r, k);
                if (ark == cplx{0.0, 0.0}) continue;
                for (std::size_t c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
            }
        return out;
    }

    CVector apply(std::span<const cplx> v) const {
        if (v.size() != cols_) throw DimensionError("matrix-vector product: size mismatch");
        CVector out(rows_, cplx{0.0, 0.0});
        for (std::size_t r = 0; r < rows_; ++r) {
            cplx s{0.0, 0.0};
            for (std::size_t c = 0; c < cols_; ++c) s += (*this)(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

private:
    void require_square(const char* what) const {
        if (!square()) throw DimensionError(std::string(what) + ": matrix is not square");
    }
    void require_same_shape(const ComplexMatrix& o, const char* what) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError(std::string(what) + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

// Kronecker product A (x) B.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ar = 0; ar < a.rows(); ++ar)
        for (std::size_t ac = 0; ac < a.cols(); ++ac) {
            const cplx s = a(ar, ac);
            if (s == cplx{0.0, 0.0}) continue;
            for (std::size_t br = 0; br < b.rows(); ++br)
                for (std::size_t bc = 0; bc < b.cols(); ++bc)
                    out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
        }
    return out;
}

inline ComplexMatrix tensor(std::span<const ComplexMatrix> factors) {
    if (factors.empty()) return ComplexMatrix::identity(1);
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

inline cplx inner(std::span<const cplx> a, std::span<const cplx> b) {
    if (a.size() != b.size()) throw DimensionError("inner product: size mismatch");
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(std::span<const cplx> v) { return std::sqrt(std::real(inner(v, v))); }

// Tr(A^dagger B)
inline cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("hs_inner: shape mismatch");
    cplx s{0.0, 0.0};
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) s += std::conj(ea[i]) * eb[i];
    return s;
}

// Eigenvalues ascending; vectors are the matching columns.
struct HermitianEigen {
    std::vector<double> values;
    ComplexMatrix vectors;

    CVector vector(std::size_t k) const {
        CVector v(vectors.rows());
        for (std::size_t r = 0; r < vectors.rows(); ++r) v[r] = vectors(r, k);
        return v;
    }
};

namespace detail {

// Cyclic Jacobi on a dense real symmetric matrix (row-major, n x n). On return
// `a` holds the eigenvalues on its diagonal and `v` the eigenvectors as columns.
inline void jacobi_symmetric(std::vector<double>& a, std::vector<double>& v, std::size_t n,
                             double off_tol) {
    v.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    auto A = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
    auto V = [&](std::size_t r, std::size_t c) -> double& { return v[r * n + c]; };

    constexpr int kMaxSweeps = 100;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(A(p, q)));
        if (off < off_tol) return;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 0.01 * off_tol) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
}

} // namespace detail

inline HermitianEigen eigh(const ComplexMatrix& m) {
    if (!m.square()) throw DimensionError("eigh: matrix is not square");
    const std::size_t n = m.rows();
    if (n == 0) return {};
    const ComplexMatrix h = m.hermitian_part();

    const std::size_t n2 = 2 * n;
    std::vector<double> emb(n2 * n2, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            const double re = h(r, c).real();
            const double im = h(r, c).imag();
            emb[r * n2 + c] = re;
            emb[(r + n) * n2 + (c + n)] = re;
            emb[r * n2 + (c + n)] = -im;
            emb[(r + n) * n2 + c] = im;
        }
    const double scale = std::max(1.0, h.max_abs());
    std::vector<double> vec;
    detail::jacobi_symmetric(emb, vec, n2, 1e-12 * scale);

    // Candidate complex vectors u + i v from each real eigenvector [u; v].
    std::vector<CVector> residual(n2, CVector(n));
    for (std::size_t k = 0; k < n2; ++k)
        for (std::size_t r = 0; r < n; ++r)
            residual[k][r] = cplx{vec[r * n2 + k], vec[(r + n) * n2 + k]};

    std::vector<bool> used(n2, false);
    std::vector<CVector> basis;
    basis.reserve(n);
    for (std::size_t picked = 0; picked < n; ++picked) {
        std::size_t best = n2;
        double best_norm = -1.0;
        for (std::size_t k = 0; k < n2; ++k) {
            if (used[k]) continue;
            const double nk = norm2(residual[k]);
            if (nk > best_norm) {
                best_norm = nk;
                best = k;
            }
        }
        used[best] = true;
        CVector e = residual[best];
        for (auto& z : e) z /= best_norm;
        // Re-orthogonalize once against the basis for numerical hygiene.
        for (const auto& b : basis) {
            const cplx proj = inner(b, e);
            for (std::size_t r = 0; r < n; ++r) e[r] -= proj * b[r];
        }
        const double ne = norm2(e);
        for (auto& z : e) z /= ne;
        for (std::size_t k = 0; k < n2; ++k) {
            if (used[k]) continue;
            const cplx proj = inner(e, residual[k]);
            for (std::size_t r = 0; r < n; ++r) residual[k][r] -= proj * e[r];
        }
        basis.push_back(std::move(e));
    }

    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t k = 0; k < n; ++k) {
        const CVector hv = h.apply(basis[k]);
        order[k] = {std::real(inner(basis[k], hv)), k};
    }
    std::sort(order.begin(), order.end());

    HermitianEigen out;
    out.values.resize(n);
    out.vectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = order[k].first;
        const CVector& b = basis[order[k].second];
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = b[r];
    }
    return out;
}

inline std::vector<double> eigvalsh(const ComplexMatrix& m) { return eigh(m).values; }

// Sum_k f(lambda_k) |v_k><v_k|
inline ComplexMatrix spectral_apply(const HermitianEigen& e,
                                    const std::function<double(double)>& f) {
    const std::size_t n = e.values.size();
    ComplexMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double fk = f(e.values[k]);
        if (fk == 0.0) continue;
        for (std::size_t r = 0; r < n; ++r) {
            const cplx vr = e.vectors(r, k) * fk;
            for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(e.vectors(c, k));
        }
    }
    return out;
}

inline ComplexMatrix spectral_apply(const ComplexMatrix& m,
                                    const std::function<double(double)>& f) {
    return spectral_apply(eigh(m), f);
}

inline ComplexMatrix sqrt_psd(const ComplexMatrix& m) {
    return spectral_apply(m, [](double x) { return x > kEigenCutoff ? std::sqrt(x) : 0.0; });
}

// Generalized inverse square root: zero on the (numerical) kernel.
inline ComplexMatrix inv_sqrt_psd(const ComplexMatrix& m) {
    return spectral_apply(m, [](double x) { return x > kEigenCutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

// Projector onto eigenvectors with eigenvalue > cutoff.
inline ComplexMatrix support_projector(const ComplexMatrix& m, double cutoff = kEigenCutoff) {
    return spectral_apply(m, [cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
}

// Positive-part projector {M > 0}.
inline ComplexMatrix positive_projector(const ComplexMatrix& m, double cutoff = 0.0) {
    return spectral_apply(m, [cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
}

// Trace norm of a Hermitian matrix.
inline double trace_norm_hermitian(const ComplexMatrix& m) {
    double s = 0.0;
    for (double x : eigvalsh(m)) s += std::abs(x);
    return s;
}

inline double min_eigenvalue(const ComplexMatrix& m) { return eigvalsh(m).front(); }
inline double max_eigenvalue(const ComplexMatrix& m) { return eigvalsh(m).back(); }

} // namespace dptkit
