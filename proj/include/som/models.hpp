#pragma once

// Concrete sub-function families:
//   * quad_fn      -- k-means quadratic (1/2)|x - y|^2
//   * ridge_fn     -- l2-regularized linear regression loss
//   * diag_quad_fn -- diagonal quadratic with per-coordinate curvature
//   * gpca_fn      -- subspace residual (1/2)|y^T A|^2 over orthonormal frames
//   * mlp_fn       -- two-layer ReLU network regression loss
// plus closed-form single/group minimizers and problem builders.

#include "adam.hpp"
#include "core.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace som {

// ---------------------------------------------------------------------------
// k-means quadratic: f(x) = (1/2)|x - y|^2

class quad_fn final : public sub_function {
  public:
    explicit quad_fn(Vec center) : center_(std::move(center)) {}

    double value(const Vec& x) const override { return 0.5 * vec_dist_sq(x, center_); }

    Vec gradient(const Vec& x) const override { return vec_sub(x, center_); }

    std::optional<Vec> minimizer() const override { return center_; }
    std::optional<double> opt_value() const override { return 0.0; }

    const Vec& center() const { return center_; }

  private:
    Vec center_;
};

// ---------------------------------------------------------------------------
// Ridge regression: f(x) = (1/2)(a^T x - b)^2 + (lambda/2)|x|^2
// L = |a|^2 + lambda, mu = lambda.

class ridge_fn final : public sub_function {
  public:
    ridge_fn(Vec a, double b, double lambda) : a_(std::move(a)), b_(b), lambda_(lambda) {
        if (!(lambda_ > 0.0)) throw invalid_input("ridge_fn: lambda must be positive");
    }

    double value(const Vec& x) const override {
        const double r = vec_dot(a_, x) - b_;
        return 0.5 * r * r + 0.5 * lambda_ * vec_norm_sq(x);
    }

    Vec gradient(const Vec& x) const override {
        const double r = vec_dot(a_, x) - b_;
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = a_[i] * r + lambda_ * x[i];
        return g;
    }

    std::optional<Vec> minimizer() const override;
    std::optional<double> opt_value() const override;

    const Vec& a() const { return a_; }
    double b() const { return b_; }
    double lambda() const { return lambda_; }
    double smoothness() const { return vec_norm_sq(a_) + lambda_; }

  private:
    Vec a_;
    double b_;
    double lambda_;
};

/// x* = a b / (lambda + |a|^2), the rank-one closed form of
/// (a a^T + lambda I) x = a b.
inline Vec ridge_sub_minimizer(const ridge_fn& sub) {
    const double scale = sub.b() / (sub.lambda() + vec_norm_sq(sub.a()));
    Vec x = sub.a();
    vec_scale(x, scale);
    return x;
}

inline std::optional<Vec> ridge_fn::minimizer() const { return ridge_sub_minimizer(*this); }

inline std::optional<double> ridge_fn::opt_value() const { return value(ridge_sub_minimizer(*this)); }

/// Solves (sum_i a_i a_i^T + lambda |C| I) x = sum_i b_i a_i for the group.
inline Vec ridge_group_minimizer(const std::vector<std::size_t>& indices,
                                 const std::vector<const ridge_fn*>& subs, double lambda) {
    if (indices.empty()) throw invalid_input("ridge_group_minimizer: empty index set");
    const std::size_t d = subs[indices[0]]->a().size();
    mat A(d, d);
    Vec rhs(d, 0.0);
    for (std::size_t idx : indices) {
        const ridge_fn& s = *subs[idx];
        for (std::size_t i = 0; i < d; ++i) {
            rhs[i] += s.b() * s.a()[i];
            for (std::size_t j = 0; j < d; ++j) A(i, j) += s.a()[i] * s.a()[j];
        }
    }
    const double shift = lambda * static_cast<double>(indices.size());
    for (std::size_t i = 0; i < d; ++i) A(i, i) += shift;
    return cholesky_solve(std::move(A), std::move(rhs));
}

// ---------------------------------------------------------------------------
// Diagonal quadratic: f(x) = (1/2) sum_d h_d (x_d - c_d)^2.  Used by the
// initialization lower-bound construction; L = max h, mu = min h.

class diag_quad_fn final : public sub_function {
  public:
    diag_quad_fn(Vec center, Vec curvature)
        : center_(std::move(center)), curvature_(std::move(curvature)) {
        if (center_.size() != curvature_.size())
            throw invalid_input("diag_quad_fn: center/curvature length mismatch");
        for (double h : curvature_)
            if (!(h > 0.0)) throw invalid_input("diag_quad_fn: curvatures must be positive");
    }

    double value(const Vec& x) const override {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - center_[i];
            s += curvature_[i] * d * d;
        }
        return 0.5 * s;
    }

    Vec gradient(const Vec& x) const override {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = curvature_[i] * (x[i] - center_[i]);
        return g;
    }

    std::optional<Vec> minimizer() const override { return center_; }
    std::optional<double> opt_value() const override { return 0.0; }

    const Vec& curvature() const { return curvature_; }

  private:
    Vec center_;
    Vec curvature_;
};

// ---------------------------------------------------------------------------
// GPCA residual: f(A) = (1/2)|y^T A|^2 with A a d x r orthonormal frame,
// flattened row-major into the parameter vector.

class gpca_fn final : public sub_function {
  public:
    gpca_fn(Vec point, std::size_t r) : y_(std::move(point)), r_(r) {
        if (r_ == 0 || r_ >= y_.size()) throw invalid_input("gpca_fn: need 1 <= r <= d - 1");
    }

    double value(const Vec& flat) const override {
        const std::size_t d = y_.size();
        double s = 0.0;
        for (std::size_t c = 0; c < r_; ++c) {
            double proj = 0.0;
            for (std::size_t i = 0; i < d; ++i) proj += y_[i] * flat[i * r_ + c];
            s += proj * proj;
        }
        return 0.5 * s;
    }

    Vec gradient(const Vec&) const override {
        throw unsupported_oracle("gpca_fn: frame parameters have no gradient oracle");
    }

    std::optional<Vec> minimizer() const override;
    std::optional<double> opt_value() const override { return 0.0; }

    const Vec& point() const { return y_; }
    std::size_t frame_rank() const { return r_; }

  private:
    Vec y_;
    std::size_t r_;
};

/// A frame spanning an r-dimensional subspace of the orthogonal complement
/// of the data vector, via the Householder reflector completing y/|y|.
inline mat gpca_sub_minimizer(const gpca_fn& sub) {
    return householder_complement(sub.point(), sub.frame_rank());
}

inline Vec flatten_frame(const mat& frame) { return frame.a; }

inline mat unflatten_frame(const Vec& flat, std::size_t d, std::size_t r) {
    if (flat.size() != d * r) throw invalid_input("unflatten_frame: size mismatch");
    mat f(d, r);
    f.a = flat;
    return f;
}

inline std::optional<Vec> gpca_fn::minimizer() const {
    return flatten_frame(gpca_sub_minimizer(*this));
}

/// Eigenvectors of (1/|C|) sum_{i in C} y_i y_i^T for the r smallest
/// eigenvalues; minimizes tr(A^T M A) over orthonormal frames.
inline mat gpca_group_minimizer(const std::vector<std::size_t>& indices,
                                const std::vector<Vec>& points, std::size_t r) {
    if (indices.empty()) throw invalid_input("gpca_group_minimizer: empty index set");
    const std::size_t d = points[indices[0]].size();
    mat M(d, d);
    for (std::size_t idx : indices) {
        const Vec& y = points[idx];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) M(i, j) += y[i] * y[j];
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    for (double& x : M.a) x *= inv;
    const sym_eig_result eig = sym_eig(M);
    mat frame(d, r);
    for (std::size_t c = 0; c < r; ++c)
        for (std::size_t i = 0; i < d; ++i) frame(i, c) = eig.vectors(i, c);
    return frame;
}

// ---------------------------------------------------------------------------
// Two-layer ReLU network:  psi(a; W, p, q, o) = p^T ReLU(W a + q) + o,
// f(theta) = (1/2)(psi(a; theta) - b)^2 + (lambda/2)|theta|^2.
// theta is flattened as (W row-major, p, q, o).

struct mlp_dims {
    std::size_t d_in = 0;
    std::size_t d_hidden = 0;

    std::size_t theta_size() const { return d_hidden * d_in + 2 * d_hidden + 1; }
};

inline double mlp_forward(const Vec& theta, const Vec& a, const mlp_dims& dims) {
    if (theta.size() != dims.theta_size() || a.size() != dims.d_in)
        throw invalid_input("mlp_forward: dimension mismatch");
    const std::size_t w_end = dims.d_hidden * dims.d_in;
    const std::size_t p_off = w_end;
    const std::size_t q_off = w_end + dims.d_hidden;
    const double o = theta[q_off + dims.d_hidden];
    double out = o;
    for (std::size_t h = 0; h < dims.d_hidden; ++h) {
        double pre = theta[q_off + h];
        for (std::size_t c = 0; c < dims.d_in; ++c) pre += theta[h * dims.d_in + c] * a[c];
        if (pre > 0.0) out += theta[p_off + h] * pre;  // ReLU'(0) := 0
    }
    return out;
}

class mlp_fn final : public sub_function {
  public:
    mlp_fn(Vec a, double b, double lambda, mlp_dims dims, std::uint64_t minimizer_seed = 0)
        : a_(std::move(a)), b_(b), lambda_(lambda), dims_(dims), minimizer_seed_(minimizer_seed) {
        if (a_.size() != dims_.d_in) throw invalid_input("mlp_fn: input dimension mismatch");
        if (!(lambda_ >= 0.0)) throw invalid_input("mlp_fn: lambda must be nonnegative");
    }

    double value(const Vec& theta) const override {
        const double e = mlp_forward(theta, a_, dims_) - b_;
        return 0.5 * e * e + 0.5 * lambda_ * vec_norm_sq(theta);
    }

    Vec gradient(const Vec& theta) const override {
        if (theta.size() != dims_.theta_size()) throw invalid_input("mlp_fn: theta size mismatch");
        const std::size_t w_end = dims_.d_hidden * dims_.d_in;
        const std::size_t p_off = w_end;
        const std::size_t q_off = w_end + dims_.d_hidden;
        const std::size_t o_off = q_off + dims_.d_hidden;

        double out = theta[o_off];
        Vec pre(dims_.d_hidden);
        for (std::size_t h = 0; h < dims_.d_hidden; ++h) {
            double s = theta[q_off + h];
            for (std::size_t c = 0; c < dims_.d_in; ++c) s += theta[h * dims_.d_in + c] * a_[c];
            pre[h] = s;
            if (s > 0.0) out += theta[p_off + h] * s;
        }
        const double e = out - b_;

        Vec g(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) g[i] = lambda_ * theta[i];
        g[o_off] += e;
        for (std::size_t h = 0; h < dims_.d_hidden; ++h) {
            if (pre[h] > 0.0) {
                g[p_off + h] += e * pre[h];
                const double back = e * theta[p_off + h];
                g[q_off + h] += back;
                for (std::size_t c = 0; c < dims_.d_in; ++c)
                    g[h * dims_.d_in + c] += back * a_[c];
            }
        }
        return g;
    }

    // Approximate per-sample minimizer: 200 ADAM steps at the default
    // learning rate from a seeded Gaussian start.  The single-sample loss is
    // nonconvex, so this is the documented stand-in for argmin f_i.
    std::optional<Vec> minimizer() const override {
        rng gen(minimizer_seed_);
        Vec theta = gen.normal_vec(dims_.theta_size());
        adam_state state(theta.size());
        const adam_config cfg{};
        for (int step = 0; step < 200; ++step) {
            const Vec g = gradient(theta);
            vec_axpy(1.0, adam_step(state, g, cfg), theta);
        }
        return theta;
    }

    const Vec& input() const { return a_; }
    double target() const { return b_; }

  private:
    Vec a_;
    double b_;
    double lambda_;
    mlp_dims dims_;
    std::uint64_t minimizer_seed_;
};

/// Value and gradient of one MLP sub-function at theta.
inline std::pair<double, Vec> mlp_value_grad(const mlp_fn& sub, const Vec& theta) {
    return {sub.value(theta), sub.gradient(theta)};
}

// ---------------------------------------------------------------------------
// Problem builders.  Each wires the family's closed-form group minimizer
// (when one exists) and the smoothness metadata into the instance.

inline problem make_quad_problem(const std::vector<Vec>& centers) {
    if (centers.empty()) throw invalid_input("make_quad_problem: no data");
    problem prob;
    prob.kind = param_kind::vector(centers[0].size());
    for (const Vec& c : centers) prob.oracles.push_back(std::make_shared<quad_fn>(c));
    prob.L = 1.0;
    prob.mu = 1.0;
    prob.group_minimizer = [centers](const std::vector<std::size_t>& idx) {
        if (idx.empty()) throw invalid_input("quad group minimizer: empty cluster");
        Vec centroid(centers[0].size(), 0.0);
        for (std::size_t i : idx) vec_axpy(1.0, centers[i], centroid);
        vec_scale(centroid, 1.0 / static_cast<double>(idx.size()));
        return centroid;
    };
    return prob;
}

inline problem make_ridge_problem(const std::vector<Vec>& as, const Vec& bs, double lambda) {
    if (as.empty() || as.size() != bs.size())
        throw invalid_input("make_ridge_problem: data shape mismatch");
    problem prob;
    prob.kind = param_kind::vector(as[0].size());
    double max_l = 0.0;
    std::vector<const ridge_fn*> raw;
    for (std::size_t i = 0; i < as.size(); ++i) {
        auto f = std::make_shared<ridge_fn>(as[i], bs[i], lambda);
        max_l = std::max(max_l, f->smoothness());
        raw.push_back(f.get());
        prob.oracles.push_back(std::move(f));
    }
    prob.L = max_l;
    prob.mu = lambda;
    prob.group_minimizer = [raw, lambda](const std::vector<std::size_t>& idx) {
        return ridge_group_minimizer(idx, raw, lambda);
    };
    return prob;
}

inline problem make_diag_quad_problem(const std::vector<Vec>& centers,
                                      const std::vector<Vec>& curvatures) {
    if (centers.empty() || centers.size() != curvatures.size())
        throw invalid_input("make_diag_quad_problem: shape mismatch");
    problem prob;
    prob.kind = param_kind::vector(centers[0].size());
    double lo = curvatures[0][0], hi = curvatures[0][0];
    for (std::size_t i = 0; i < centers.size(); ++i) {
        prob.oracles.push_back(std::make_shared<diag_quad_fn>(centers[i], curvatures[i]));
        for (double h : curvatures[i]) {
            lo = std::min(lo, h);
            hi = std::max(hi, h);
        }
    }
    prob.L = hi;
    prob.mu = lo;
    // Coordinate-separable: weighted centroid per coordinate.
    prob.group_minimizer = [centers, curvatures](const std::vector<std::size_t>& idx) {
        if (idx.empty()) throw invalid_input("diag quad group minimizer: empty cluster");
        const std::size_t d = centers[0].size();
        Vec num(d, 0.0), den(d, 0.0);
        for (std::size_t i : idx) {
            for (std::size_t c = 0; c < d; ++c) {
                num[c] += curvatures[i][c] * centers[i][c];
                den[c] += curvatures[i][c];
            }
        }
        Vec x(d);
        for (std::size_t c = 0; c < d; ++c) x[c] = num[c] / den[c];
        return x;
    };
    return prob;
}

inline problem make_gpca_problem(const std::vector<Vec>& points, std::size_t r) {
    if (points.empty()) throw invalid_input("make_gpca_problem: no data");
    const std::size_t d = points[0].size();
    problem prob;
    prob.kind = param_kind::frame(d, r);
    for (const Vec& y : points) prob.oracles.push_back(std::make_shared<gpca_fn>(y, r));
    prob.group_minimizer = [points, r](const std::vector<std::size_t>& idx) {
        return flatten_frame(gpca_group_minimizer(idx, points, r));
    };
    return prob;
}

inline problem make_mnr_problem(const std::vector<Vec>& inputs, const Vec& targets,
                                double lambda, mlp_dims dims, std::uint64_t seed) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw invalid_input("make_mnr_problem: data shape mismatch");
    problem prob;
    prob.kind = param_kind::vector(dims.theta_size());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        prob.oracles.push_back(std::make_shared<mlp_fn>(
            inputs[i], targets[i], lambda, dims, derive_seed(seed, seed_role::minimizer, i)));
    }
    return prob;
}

}  // namespace som
