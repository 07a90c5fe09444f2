// qcore.hpp
// Quantum states on small registers and the distance measures between them.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dptkit/errors.hpp"
#include "dptkit/linalg.hpp"

namespace dptkit {

inline constexpr double kStateTolerance = 1e-10;

// Ordered local dimensions of a composite register; subsystem 0 is the most
// significant digit of the basis index.
class SubsystemSpec {
public:
    SubsystemSpec() = default;
    explicit SubsystemSpec(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
        for (auto d : dims_)
            if (d == 0) throw DimensionError("SubsystemSpec: zero local dimension");
    }

    std::span<const std::size_t> dims() const noexcept { return dims_; }
    std::size_t count() const noexcept { return dims_.size(); }
    std::size_t total() const noexcept {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                               std::multiplies<>{});
    }

    std::vector<std::size_t> digits(std::size_t index) const {
        std::vector<std::size_t> d(dims_.size());
        for (std::size_t k = dims_.size(); k-- > 0;) {
            d[k] = index % dims_[k];
            index /= dims_[k];
        }
        return d;
    }

private:
    std::vector<std::size_t> dims_;
};

class PureState {
public:
    explicit PureState(CVector amplitudes, double tol = kStateTolerance)
        : amps_(std::move(amplitudes)) {
        if (amps_.empty()) throw DimensionError("PureState: empty amplitude vector");
        const double n = norm2(amps_);
        if (!std::isfinite(n) || std::abs(n - 1.0) > tol)
            throw DomainError("PureState: norm " + std::to_string(n) + " is not 1");
    }

    // Normalizes the given vector first.
    static PureState normalized(CVector v) {
        const double n = norm2(v);
        if (!(n > 0.0)) throw DomainError("PureState: zero vector");
        for (auto& z : v) z /= n;
        return PureState(std::move(v));
    }

    static PureState basis(std::size_t dim, std::size_t k) {
        CVector v(dim, cplx{0.0, 0.0});
        v.at(k) = 1.0;
        return PureState(std::move(v));
    }

    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    ComplexMatrix projector() const { return ComplexMatrix::outer(amps_); }

private:
    CVector amps_;
};

// Density operator: Hermitian, positive semidefinite, unit trace, all within
// the tolerance given at construction.
class DensityOperator {
public:
    explicit DensityOperator(ComplexMatrix m, double tol = kStateTolerance) : tol_(tol) {
        if (!m.square() || m.rows() == 0)
            throw DimensionError("DensityOperator: matrix must be square and non-empty");
        if (!m.is_hermitian(tol)) throw DomainError("DensityOperator: matrix is not Hermitian");
        m = m.hermitian_part();
        const double tr = m.trace().real();
        if (std::abs(tr - 1.0) > tol)
            throw DomainError("DensityOperator: trace " + std::to_string(tr) + " is not 1");
        eig_ = eigh(m);
        if (eig_.values.front() < -tol)
            throw DomainError("DensityOperator: negative eigenvalue " +
                              std::to_string(eig_.values.front()));
        m_ = std::move(m);
    }

    DensityOperator(const PureState& psi) : DensityOperator(psi.projector()) {}

    static DensityOperator maximally_mixed(std::size_t dim) {
        ComplexMatrix m = ComplexMatrix::identity(dim);
        m *= 1.0 / static_cast<double>(dim);
        return DensityOperator(std::move(m));
    }

    static DensityOperator diagonal(std::span<const double> probs) {
        return DensityOperator(ComplexMatrix::diagonal(probs));
    }

    std::size_t dim() const noexcept { return m_.rows(); }
    const ComplexMatrix& matrix() const noexcept { return m_; }
    const HermitianEigen& eigen() const noexcept { return eig_; }
    double tolerance() const noexcept { return tol_; }

    // Eigenvalues clipped at zero.
    std::vector<double> spectrum() const {
        std::vector<double> s = eig_.values;
        for (auto& x : s) x = std::max(0.0, x);
        return s;
    }

    ComplexMatrix sqrt() const {
        return spectral_apply(eig_, [](double x) { return x > kEigenCutoff ? std::sqrt(x) : 0.0; });
    }

    DensityOperator conjugated(const ComplexMatrix& u) const {
        return DensityOperator((u * m_ * u.adjoint()).hermitian_part(), tol_);
    }

private:
    ComplexMatrix m_;
    HermitianEigen eig_;
    double tol_ = kStateTolerance;
};

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
    return DensityOperator(tensor(a.matrix(), b.matrix()), std::max(a.tolerance(), b.tolerance()));
}

// Convex combination w*a + (1-w)*b.
inline DensityOperator mix(double w, const DensityOperator& a, const DensityOperator& b) {
    if (a.dim() != b.dim()) throw DimensionError("mix: dimension mismatch");
    return DensityOperator(a.matrix() * w + b.matrix() * (1.0 - w));
}

// Partial trace keeping the listed subsystems (in their original order).
inline ComplexMatrix partial_trace(const ComplexMatrix& m, const SubsystemSpec& spec,
                                   std::span<const std::size_t> keep) {
    if (!m.square() || spec.total() != m.rows())
        throw DimensionError("partial_trace: subsystem dims multiply to " +
                             std::to_string(spec.total()) + " but operator has dim " +
                             std::to_string(m.rows()));
    std::set<std::size_t> kept(keep.begin(), keep.end());
    for (auto k : kept)
        if (k >= spec.count()) throw DimensionError("partial_trace: subsystem index out of range");

    const auto dims = spec.dims();
    std::size_t keep_dim = 1;
    std::size_t trace_dim = 1;
    for (std::size_t k = 0; k < dims.size(); ++k) (kept.count(k) ? keep_dim : trace_dim) *= dims[k];

    // Map (kept index, traced index) -> full index.
    std::vector<std::size_t> full(keep_dim * trace_dim);
    for (std::size_t idx = 0; idx < spec.total(); ++idx) {
        const auto d = spec.digits(idx);
        std::size_t ki = 0;
        std::size_t ti = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (kept.count(k))
                ki = ki * dims[k] + d[k];
            else
                ti = ti * dims[k] + d[k];
        }
        full[ki * trace_dim + ti] = idx;
    }

    ComplexMatrix out(keep_dim, keep_dim);
    for (std::size_t r = 0; r < keep_dim; ++r)
        for (std::size_t c = 0; c < keep_dim; ++c) {
            cplx s{0.0, 0.0};
            for (std::size_t t = 0; t < trace_dim; ++t)
                s += m(full[r * trace_dim + t], full[c * trace_dim + t]);
            out(r, c) = s;
        }
    return out;
}

inline DensityOperator partial_trace(const DensityOperator& rho, const SubsystemSpec& spec,
                                     std::span<const std::size_t> keep) {
    return DensityOperator(partial_trace(rho.matrix(), spec, keep).hermitian_part(),
                           rho.tolerance());
}

inline DensityOperator partial_trace(const DensityOperator& rho, const SubsystemSpec& spec,
                                     std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, spec, std::span<const std::size_t>(keep.begin(), keep.size()));
}

inline void require_same_dim(const DensityOperator& a, const DensityOperator& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimensionError(std::string(what) + ": dimensions " + std::to_string(a.dim()) +
                             " and " + std::to_string(b.dim()) + " differ");
}

// F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1 = Tr sqrt( sqrt(sigma) rho sqrt(sigma) ).
inline double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_dim(rho, sigma, "fidelity");
    const ComplexMatrix ss = sigma.sqrt();
    const ComplexMatrix inner_op = (ss * rho.matrix() * ss).hermitian_part();
    double f = 0.0;
    // Eigenvalues under the cutoff are rounding noise of a rank-deficient
    // product; their square roots would otherwise add ~1e-8 each.
    for (double x : eigvalsh(inner_op))
        if (x > kEigenCutoff) f += std::sqrt(x);
    return std::clamp(f, 0.0, 1.0);
}

// ||rho - sigma||_1, in [0, 2].
inline double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    require_same_dim(rho, sigma, "trace_distance");
    return std::clamp(trace_norm_hermitian(rho.matrix() - sigma.matrix()), 0.0, 2.0);
}

// sqrt(1 - F^2), in [0, 1].
inline double purified_distance(const DensityOperator& rho, const DensityOperator& sigma) {
    const double f = fidelity(rho, sigma);
    return std::sqrt(std::max(0.0, 1.0 - f * f));
}

} // namespace dptkit
