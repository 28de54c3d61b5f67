#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrng/distribution.hpp"

namespace qrng::probcore {

using cdouble = std::complex<double>;

// Dense complex matrix of dimension <= 8, covering density operators and
// measurement operators for the small decomposition demos.
class SmallOperator {
public:
    static constexpr std::size_t max_dim = 8;

    SmallOperator(std::size_t dim, std::vector<cdouble> entries)
        : dim_(dim), a_(std::move(entries)) {
        if (dim_ == 0 || dim_ > max_dim)
            throw std::invalid_argument("SmallOperator: dimension must be in [1,8]");
        if (a_.size() != dim_ * dim_)
            throw std::invalid_argument("SmallOperator: entry count does not match dimension");
    }

    static SmallOperator zero(std::size_t dim) {
        return SmallOperator(dim, std::vector<cdouble>(dim * dim, 0.0));
    }

    static SmallOperator identity(std::size_t dim) {
        auto op = zero(dim);
        for (std::size_t i = 0; i < dim; ++i) op.at(i, i) = 1.0;
        return op;
    }

    static SmallOperator diagonal(const std::vector<cdouble>& d) {
        auto op = zero(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) op.at(i, i) = d[i];
        return op;
    }

    // |v><v| for an (unnormalized) column vector v.
    static SmallOperator outer(const std::vector<cdouble>& v) {
        auto op = zero(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            for (std::size_t j = 0; j < v.size(); ++j)
                op.at(i, j) = v[i] * std::conj(v[j]);
        return op;
    }

    static SmallOperator basis_projector(std::size_t dim, std::size_t k) {
        auto op = zero(dim);
        op.at(k, k) = 1.0;
        return op;
    }

    std::size_t dim() const { return dim_; }
    cdouble& at(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const cdouble& at(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    SmallOperator adjoint() const {
        auto r = zero(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) r.at(i, j) = std::conj(at(j, i));
        return r;
    }

    SmallOperator operator*(const SmallOperator& o) const {
        check_same_dim(o);
        auto r = zero(dim_);
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t k = 0; k < dim_; ++k) {
                cdouble aik = at(i, k);
                if (aik == cdouble{}) continue;
                for (std::size_t j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
            }
        return r;
    }

    SmallOperator operator+(const SmallOperator& o) const {
        check_same_dim(o);
        auto r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }

    SmallOperator scaled(cdouble s) const {
        auto r = *this;
        for (auto& e : r.a_) e *= s;
        return r;
    }

    cdouble trace() const {
        cdouble t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += at(i, i);
        return t;
    }

    double max_abs_entry() const {
        double m = 0.0;
        for (const auto& e : a_) m = std::max(m, std::abs(e));
        return m;
    }

    bool is_hermitian(double tol = 1e-12) const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j)
                if (std::abs(at(i, j) - std::conj(at(j, i))) > tol) return false;
        return true;
    }

    bool is_identity(double tol = 1e-12) const {
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = 0; j < dim_; ++j) {
                cdouble want = (i == j) ? 1.0 : 0.0;
                if (std::abs(at(i, j) - want) > tol) return false;
            }
        return true;
    }

    // Eigenvalues of a Hermitian operator via cyclic Jacobi rotations,
    // returned in ascending order.
    std::vector<double> hermitian_eigenvalues() const {
        if (!is_hermitian(1e-9))
            throw std::invalid_argument("hermitian_eigenvalues: operator not Hermitian");
        SmallOperator a = *this;
        // symmetrize away representation noise
        for (std::size_t i = 0; i < dim_; ++i)
            for (std::size_t j = i + 1; j < dim_; ++j) {
                cdouble m = 0.5 * (a.at(i, j) + std::conj(a.at(j, i)));
                a.at(i, j) = m;
                a.at(j, i) = std::conj(m);
            }
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (std::size_t p = 0; p < dim_; ++p)
                for (std::size_t q = p + 1; q < dim_; ++q) off += std::norm(a.at(p, q));
            if (off < 1e-30) break;
            for (std::size_t p = 0; p < dim_; ++p)
                for (std::size_t q = p + 1; q < dim_; ++q) a.jacobi_rotate(p, q);
        }
        std::vector<double> ev(dim_);
        for (std::size_t i = 0; i < dim_; ++i) ev[i] = a.at(i, i).real();
        std::sort(ev.begin(), ev.end());
        return ev;
    }

    bool is_positive_semidefinite(double tol = 1e-10) const {
        auto ev = hermitian_eigenvalues();
        return ev.front() >= -tol;
    }

    bool is_density(double tol = 1e-12) const {
        return is_hermitian(tol) && std::abs(trace() - cdouble{1.0}) <= tol &&
               is_positive_semidefinite(std::max(tol, 1e-10));
    }

private:
    void check_same_dim(const SmallOperator& o) const {
        if (o.dim_ != dim_)
            throw std::invalid_argument("SmallOperator: dimension mismatch");
    }

    // One Hermitian Jacobi rotation zeroing the (p,q) entry.
    void jacobi_rotate(std::size_t p, std::size_t q) {
        cdouble apq = at(p, q);
        double abs_apq = std::abs(apq);
        if (abs_apq < 1e-300) return;
        cdouble phase = apq / abs_apq;
        double app = at(p, p).real();
        double aqq = at(q, q).real();
        double tau = (aqq - app) / (2.0 * abs_apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        // columns: [p] <- c*[p] - s*conj(phase)*[q]; [q] <- s*phase*[p] + c*[q]
        for (std::size_t i = 0; i < dim_; ++i) {
            cdouble aip = at(i, p);
            cdouble aiq = at(i, q);
            at(i, p) = c * aip - s * std::conj(phase) * aiq;
            at(i, q) = s * phase * aip + c * aiq;
        }
        for (std::size_t j = 0; j < dim_; ++j) {
            cdouble apj = at(p, j);
            cdouble aqj = at(q, j);
            at(p, j) = c * apj - s * phase * aqj;
            at(q, j) = s * std::conj(phase) * apj + c * aqj;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
    }

    std::size_t dim_;
    std::vector<cdouble> a_;
};

// P(x,c) = tr(Pi_x E_c rho E_c^dag) for a density operator rho, noise
// operators with sum_c E_c^dag E_c = id, and a projective measurement.
inline JointDistribution born_joint(const SmallOperator& state,
                                    const std::vector<SmallOperator>& noise_ops,
                                    const std::vector<SmallOperator>& projectors) {
    if (noise_ops.empty() || projectors.empty())
        throw std::invalid_argument("born_joint: empty operator list");
    if (!state.is_hermitian(1e-12))
        throw std::invalid_argument("born_joint: state is not Hermitian");
    if (std::abs(state.trace() - cdouble{1.0}) > 1e-12)
        throw std::invalid_argument("born_joint: state trace is not 1");
    if (!state.is_positive_semidefinite())
        throw std::invalid_argument("born_joint: state is not positive semidefinite");

    auto completeness = SmallOperator::zero(state.dim());
    for (const auto& e : noise_ops) completeness = completeness + e.adjoint() * e;
    if (!completeness.is_identity(1e-12))
        throw std::invalid_argument("born_joint: noise operators do not sum to identity");

    auto proj_sum = SmallOperator::zero(state.dim());
    for (const auto& pi : projectors) {
        if (!pi.is_hermitian(1e-12))
            throw std::invalid_argument("born_joint: projector is not Hermitian");
        if (!pi.is_positive_semidefinite())
            throw std::invalid_argument("born_joint: projector is not positive semidefinite");
        proj_sum = proj_sum + pi;
    }
    if (!proj_sum.is_identity(1e-12))
        throw std::invalid_argument("born_joint: projectors do not sum to identity");

    std::vector<std::string> x_labels, c_labels;
    for (std::size_t ix = 0; ix < projectors.size(); ++ix)
        x_labels.push_back(std::to_string(ix));
    for (std::size_t ic = 0; ic < noise_ops.size(); ++ic)
        c_labels.push_back(std::to_string(ic));

    std::vector<double> probs(projectors.size() * noise_ops.size(), 0.0);
    for (std::size_t ic = 0; ic < noise_ops.size(); ++ic) {
        SmallOperator evolved = noise_ops[ic] * state * noise_ops[ic].adjoint();
        for (std::size_t ix = 0; ix < projectors.size(); ++ix) {
            double p = (projectors[ix] * evolved).trace().real();
            if (p < 0.0) {
                if (p < -1e-12)
                    throw std::invalid_argument("born_joint: negative Born probability");
                p = 0.0;
            }
            probs[ix * noise_ops.size() + ic] = p;
        }
    }
    return JointDistribution(std::move(x_labels), std::move(c_labels), std::move(probs));
}

}  // namespace qrng::probcore
