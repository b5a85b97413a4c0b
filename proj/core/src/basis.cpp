#include "swing/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swing/error.hpp"

namespace swing {

std::string to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::normalized_hermite: return "normalized_hermite";
        case BasisKind::monomial: return "monomial";
        case BasisKind::indicator_partition: return "indicator_partition";
    }
    return "unknown";
}

BasisKind basis_kind_from_string(const std::string& name) {
    if (name == "normalized_hermite" || name == "hermite") return BasisKind::normalized_hermite;
    if (name == "monomial") return BasisKind::monomial;
    if (name == "indicator_partition" || name == "indicator") return BasisKind::indicator_partition;
    throw ConfigError("unknown basis kind '" + name + "'");
}

void BasisSpec::validate() const {
    if (size < 1) throw ConfigError("basis size m must be >= 1");
    if (kind == BasisKind::indicator_partition) {
        if (breakpoints.size() + 1 != size) {
            std::ostringstream msg;
            msg << "indicator basis of size " << size << " needs " << size - 1 << " breakpoints (got "
                << breakpoints.size() << ")";
            throw ConfigError(msg.str());
        }
        for (std::size_t i = 1; i < breakpoints.size(); ++i) {
            if (!(breakpoints[i] > breakpoints[i - 1])) {
                throw ConfigError("indicator breakpoints must be strictly increasing");
            }
        }
    }
}

double hermite_raw(unsigned degree, double x) noexcept {
    if (degree == 0) return 1.0;
    double prev = 1.0;
    double cur = 2.0 * x;
    for (unsigned k = 1; k < degree; ++k) {
        const double next = 2.0 * x * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

double hermite_probabilists(unsigned degree, double x) noexcept {
    if (degree == 0) return 1.0;
    double prev = 1.0;
    double cur = x;
    for (unsigned k = 1; k < degree; ++k) {
        const double next = x * cur - k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

void eval_basis(const BasisSpec& spec, double x, std::span<double> out) {
    const std::size_t m = spec.size;
    switch (spec.kind) {
        case BasisKind::normalized_hermite: {
            // He_k / sqrt(k!) is orthonormal under N(0, 1).
            double prev = 1.0;
            double cur = x;
            out[0] = 1.0;
            double factorial_root = 1.0;
            for (std::size_t k = 1; k < m; ++k) {
                if (k > 1) {
                    const double next = x * cur - static_cast<double>(k - 1) * prev;
                    prev = cur;
                    cur = next;
                }
                factorial_root *= std::sqrt(static_cast<double>(k));
                out[k] = cur / factorial_root;
            }
            break;
        }
        case BasisKind::monomial: {
            double p = 1.0;
            for (std::size_t k = 0; k < m; ++k) {
                out[k] = p;
                p *= x;
            }
            break;
        }
        case BasisKind::indicator_partition: {
            std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(m), 0.0);
            const auto cell = static_cast<std::size_t>(
                std::upper_bound(spec.breakpoints.begin(), spec.breakpoints.end(), x) - spec.breakpoints.begin());
            out[cell] = 1.0;
            break;
        }
    }
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, double x) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(spec.size));
    eval_basis(spec, x, std::span<double>(v.data(), spec.size));
    return v;
}

Eigen::MatrixXd design_matrix(const BasisSpec& spec, std::span<const double> xs) {
    // Column-major storage would scatter each row; build row-major then copy.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(
        static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(spec.size));
    for (std::size_t p = 0; p < xs.size(); ++p) {
        eval_basis(spec, xs[p], std::span<double>(f.row(static_cast<Eigen::Index>(p)).data(), spec.size));
    }
    return f;
}

double GramMatrix::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(values, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

bool GramMatrix::singular(double tolerance) const {
    const double scale = std::max(1.0, values.diagonal().cwiseAbs().maxCoeff());
    return min_eigenvalue() <= tolerance * scale;
}

GramMatrix empirical_gram(const Eigen::MatrixXd& features) {
    const Eigen::Index n = features.rows();
    const Eigen::Index m = features.cols();
    if (n < 1) throw DomainError("empirical_gram needs at least one sample");
    GramMatrix g;
    g.samples = static_cast<std::size_t>(n);
    g.values = Eigen::MatrixXd::Zero(m, m);
    // Fixed sample order keeps the sums bit-stable.
    for (Eigen::Index p = 0; p < n; ++p) {
        for (Eigen::Index i = 0; i < m; ++i) {
            const double fi = features(p, i);
            if (fi == 0.0) continue;
            for (Eigen::Index j = i; j < m; ++j) g.values(i, j) += fi * features(p, j);
        }
    }
    const double inv = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i; j < m; ++j) {
            g.values(i, j) *= inv;
            g.values(j, i) = g.values(i, j);
        }
    }
    return g;
}

GramSolver::GramSolver(const GramMatrix& gram) {
    const auto& a = gram.values;
    if (!a.allFinite()) throw NumericalError("Gram matrix has non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    min_singular_ = sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
    condition_ = min_singular_ > 0.0 ? largest / min_singular_ : INFINITY;
    const double cutoff = largest * 1e-12 * static_cast<double>(std::max<Eigen::Index>(1, a.rows()));
    rank_ = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank_;
    }
    if (condition_ <= kConditionLimit) {
        llt_.compute(a);
        if (llt_.info() == Eigen::Success) return;
    }
    pseudo_ = true;
    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    pinv_ = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

CoefficientVector GramSolver::solve(const Eigen::VectorXd& moment) const {
    if (!moment.allFinite()) throw NumericalError("regression moment vector has non-finite entries");
    CoefficientVector out;
    out.theta = pseudo_ ? Eigen::VectorXd(pinv_ * moment) : Eigen::VectorXd(llt_.solve(moment));
    out.rank = rank_;
    out.min_singular_value = min_singular_;
    out.condition_number = condition_;
    out.pseudo_inverse = pseudo_;
    return out;
}

CoefficientVector solve_coefficients(const GramMatrix& gram, const Eigen::VectorXd& moment) {
    if (static_cast<std::size_t>(moment.size()) != gram.size()) {
        throw DomainError("moment vector length does not match the Gram matrix");
    }
    return GramSolver(gram).solve(moment);
}

std::pair<double, double> gram_determinant_residual(std::span<const double> x,
                                                    const std::vector<std::vector<double>>& basis_samples) {
    const std::size_t n = basis_samples.size();
    const std::size_t samples = x.size();
    if (samples == 0) throw DomainError("empty sample vector");
    for (const auto& b : basis_samples) {
        if (b.size() != samples) throw DomainError("basis samples must match the length of x");
    }
    const double inv = 1.0 / static_cast<double>(samples);
    auto inner = [&](std::span<const double> u, std::span<const double> v) {
        double acc = 0.0;
        for (std::size_t i = 0; i < samples; ++i) acc += u[i] * v[i];
        return acc * inv;
    };

    Eigen::MatrixXd basis_gram(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            basis_gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                basis_gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                    inner(basis_samples[i], basis_samples[j]);
        }
    }
    const double basis_det = n == 0 ? 1.0 : basis_gram.determinant();
    if (!(basis_det > 1e-12)) throw DomainError("basis samples are (numerically) linearly dependent");

    Eigen::MatrixXd full(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n + 1));
    full(0, 0) = inner(x, x);
    Eigen::VectorXd cross(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        cross(ii) = inner(x, basis_samples[i]);
        full(0, ii + 1) = full(ii + 1, 0) = cross(ii);
    }
    if (n > 0) full.bottomRightCorner(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = basis_gram;
    const double lhs = full.determinant();

    // Residual of the orthogonal projection, computed directly from samples.
    Eigen::VectorXd coef = n == 0 ? Eigen::VectorXd() : Eigen::VectorXd(basis_gram.ldlt().solve(cross));
    double residual = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        double fitted = 0.0;
        for (std::size_t i = 0; i < n; ++i) fitted += coef(static_cast<Eigen::Index>(i)) * basis_samples[i][s];
        const double r = x[s] - fitted;
        residual += r * r;
    }
    residual *= inv;
    return {lhs, residual * basis_det};
}

}  // namespace swing
