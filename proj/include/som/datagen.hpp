#pragma once

// Synthetic dataset generators with retained ground truth, plus a
// line-delimited dump/load format for cross-implementation comparison.
//
// Every generator draws from fixed role substreams of the caller's seed
// (parameters / data / noise / labels), so regenerating with a different N
// reproduces the same ground-truth parameters.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "linalg.hpp"
#include "models.hpp"
#include "rng.hpp"

namespace som {

/// A generated dataset: inputs/targets for regression (points live in
/// `inputs` with empty `targets` for GPCA), true labels, and the
/// ground-truth parameters that produced it.
struct labeled_dataset {
    std::string family;  // "gpca" | "mlr" | "mnr"
    std::size_t k = 0;
    std::size_t dim = 0;       // point dim (gpca) or input dim (regression)
    std::size_t hidden = 0;    // mnr only
    std::size_t frame_rank = 0;  // gpca only: co-dimension r
    double sigma = 0.0;
    std::uint64_t seed = 0;

    std::vector<Vec> inputs;
    Vec targets;
    std::vector<std::size_t> labels;
    std::vector<Vec> true_params;  // per cluster; frames flattened row-major
    std::vector<Vec> true_basis;   // gpca only: the two spanning unit vectors

    std::size_t size() const { return inputs.size(); }
};

/// k clusters of points on random 2-dimensional subspaces of R^d.
/// true_params holds the d x (d-2) complement frame of each subspace.
inline labeled_dataset gen_gpca(std::size_t k, std::size_t d, std::size_t r, std::size_t n,
                                std::uint64_t seed) {
    if (d < 3) throw invalid_input("gen_gpca: need d >= 3");
    if (k == 0 || n == 0 || r == 0 || r >= d) throw invalid_input("gen_gpca: bad shape");

    labeled_dataset ds;
    ds.family = "gpca";
    ds.k = k;
    ds.dim = d;
    ds.frame_rank = r;
    ds.seed = seed;

    rng rp(derive_seed(seed, seed_role::params));
    rng rd(derive_seed(seed, seed_role::data));
    rng rl(derive_seed(seed, seed_role::labels));

    std::vector<Vec> eps1(k), eps2(k);
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<Vec> basis;
        while (basis.size() < 2) {
            Vec v = rp.normal_vec(d);
            if (orthonormalize_against(basis, v)) basis.push_back(v);
        }
        eps1[j] = basis[0];
        eps2[j] = basis[1];
        ds.true_basis.push_back(basis[0]);
        ds.true_basis.push_back(basis[1]);
        ds.true_params.push_back(flatten_frame(complement_basis(basis, d)));
    }

    ds.inputs.reserve(n);
    ds.labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = rl.uniform_index(k);
        const double xi1 = rd.normal();
        const double xi2 = rd.normal();
        Vec y(d);
        for (std::size_t c = 0; c < d; ++c) y[c] = xi1 * eps1[j][c] + xi2 * eps2[j][c];
        ds.inputs.push_back(std::move(y));
        ds.labels.push_back(j);
    }
    return ds;
}

/// Mixed linear regression: b_i = a_i^T x+_{c_i} + eps_i.
inline labeled_dataset gen_mlr(std::size_t k, std::size_t d, std::size_t n, double sigma,
                               std::uint64_t seed) {
    if (k == 0 || d == 0 || n == 0) throw invalid_input("gen_mlr: bad shape");
    if (!(sigma >= 0.0)) throw invalid_input("gen_mlr: sigma must be >= 0");

    labeled_dataset ds;
    ds.family = "mlr";
    ds.k = k;
    ds.dim = d;
    ds.sigma = sigma;
    ds.seed = seed;

    rng rp(derive_seed(seed, seed_role::params));
    rng rd(derive_seed(seed, seed_role::data));
    rng rn(derive_seed(seed, seed_role::noise));
    rng rl(derive_seed(seed, seed_role::labels));

    for (std::size_t j = 0; j < k; ++j) ds.true_params.push_back(rp.normal_vec(d));

    ds.inputs.reserve(n);
    ds.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec a = rd.normal_vec(d);
        const std::size_t c = rl.uniform_index(k);
        const double eps = sigma > 0.0 ? sigma * rn.normal() : 0.0;
        ds.targets.push_back(vec_dot(a, ds.true_params[c]) + eps);
        ds.inputs.push_back(std::move(a));
        ds.labels.push_back(c);
    }
    return ds;
}

struct mnr_data {
    labeled_dataset train;
    labeled_dataset test;
};

/// Mixed nonlinear regression over two-layer ReLU networks, with a held-out
/// test set drawn from the same law on disjoint substreams.
inline mnr_data gen_mnr(std::size_t k, std::size_t d_in, std::size_t d_hidden, std::size_t n,
                        std::size_t n_test, double sigma, std::uint64_t seed) {
    if (k == 0 || d_in == 0 || d_hidden == 0 || n == 0) throw invalid_input("gen_mnr: bad shape");
    if (!(sigma >= 0.0)) throw invalid_input("gen_mnr: sigma must be >= 0");
    const mlp_dims dims{d_in, d_hidden};

    rng rp(derive_seed(seed, seed_role::params));
    std::vector<Vec> thetas;
    for (std::size_t j = 0; j < k; ++j) thetas.push_back(rp.normal_vec(dims.theta_size()));

    auto fill = [&](labeled_dataset& ds, std::size_t count, std::uint64_t role_data,
                    std::uint64_t role_noise, std::uint64_t role_labels) {
        ds.family = "mnr";
        ds.k = k;
        ds.dim = d_in;
        ds.hidden = d_hidden;
        ds.sigma = sigma;
        ds.seed = seed;
        ds.true_params = thetas;
        rng rd(derive_seed(seed, role_data));
        rng rn(derive_seed(seed, role_noise));
        rng rl(derive_seed(seed, role_labels));
        for (std::size_t i = 0; i < count; ++i) {
            Vec a = rd.normal_vec(d_in);
            const std::size_t c = rl.uniform_index(k);
            const double eps = sigma > 0.0 ? sigma * rn.normal() : 0.0;
            ds.targets.push_back(mlp_forward(thetas[c], a, dims) + eps);
            ds.inputs.push_back(std::move(a));
            ds.labels.push_back(c);
        }
    };

    mnr_data out;
    fill(out.train, n, seed_role::data, seed_role::noise, seed_role::labels);
    fill(out.test, n_test, seed_role::test_data, seed_role::test_noise, seed_role::test_labels);
    return out;
}

// ---------------------------------------------------------------------------
// Dump/load.  Line-delimited text; every float is printed with %.17g so a
// round trip is bit-exact.  Field order:
//   header:  som-dataset 1 <family> k dim hidden frame_rank sigma seed N
//   per cluster:   param <flattened ground-truth values...>
//   gpca only:     basis <unit vector values...>        (two lines per cluster)
//   per sample:    data <input values...> <target> <label>   (no target for gpca)

namespace detail {
inline void put_double(std::string& line, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), " %.17g", v);
    line += buf;
}
}  // namespace detail

inline void dump_dataset(const labeled_dataset& ds, std::ostream& os) {
    os << "som-dataset 1 " << ds.family << ' ' << ds.k << ' ' << ds.dim << ' ' << ds.hidden
       << ' ' << ds.frame_rank;
    {
        std::string head;
        detail::put_double(head, ds.sigma);
        os << head;
    }
    os << ' ' << ds.seed << ' ' << ds.size() << '\n';
    for (const Vec& p : ds.true_params) {
        std::string line = "param";
        for (double v : p) detail::put_double(line, v);
        os << line << '\n';
    }
    for (const Vec& b : ds.true_basis) {
        std::string line = "basis";
        for (double v : b) detail::put_double(line, v);
        os << line << '\n';
    }
    const bool has_targets = !ds.targets.empty();
    for (std::size_t i = 0; i < ds.size(); ++i) {
        std::string line = "data";
        for (double v : ds.inputs[i]) detail::put_double(line, v);
        if (has_targets) detail::put_double(line, ds.targets[i]);
        line += ' ';
        line += std::to_string(ds.labels[i]);
        os << line << '\n';
    }
}

inline void dump_dataset(const labeled_dataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw invalid_input("dump_dataset: cannot open " + path);
    dump_dataset(ds, os);
}

inline labeled_dataset load_dataset(std::istream& is) {
    labeled_dataset ds;
    std::string magic;
    int version = 0;
    std::size_t n = 0;
    is >> magic >> version >> ds.family >> ds.k >> ds.dim >> ds.hidden >> ds.frame_rank >>
        ds.sigma >> ds.seed >> n;
    if (magic != "som-dataset" || version != 1)
        throw invalid_input("load_dataset: unrecognized header");
    const bool has_targets = ds.family != "gpca";
    const std::size_t param_len = ds.family == "gpca" ? ds.dim * (ds.dim - 2)
                                  : ds.family == "mnr"
                                      ? mlp_dims{ds.dim, ds.hidden}.theta_size()
                                      : ds.dim;
    std::string tag;
    while (is >> tag) {
        if (tag == "param") {
            Vec p(param_len);
            for (double& v : p) is >> v;
            ds.true_params.push_back(std::move(p));
        } else if (tag == "basis") {
            Vec b(ds.dim);
            for (double& v : b) is >> v;
            ds.true_basis.push_back(std::move(b));
        } else if (tag == "data") {
            Vec x(ds.dim);
            for (double& v : x) is >> v;
            if (has_targets) {
                double t = 0.0;
                is >> t;
                ds.targets.push_back(t);
            }
            std::size_t label = 0;
            is >> label;
            ds.inputs.push_back(std::move(x));
            ds.labels.push_back(label);
        } else {
            throw invalid_input("load_dataset: unexpected record tag " + tag);
        }
    }
    if (ds.size() != n) throw invalid_input("load_dataset: sample count mismatch");
    return ds;
}

inline labeled_dataset load_dataset(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw invalid_input("load_dataset: cannot open " + path);
    return load_dataset(is);
}

}  // namespace som
