#include "schrolab/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace schrolab::quad {

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1,1], mapped to [0,1].
Rule golub_welsch_jacobi(int n, double a, double b) {
    Eigen::VectorXd diag(n), off(n > 1 ? n - 1 : 1);
    diag(0) = (b - a) / (a + b + 2.0);
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        diag(k) = (b * b - a * a) / (s * (s + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double s = 2.0 * k + a + b;
        const double num = 4.0 * k * (k + a) * (k + b) * (k + a + b);
        const double den = s * s * (s + 1.0) * (s - 1.0);
        off(k - 1) = std::sqrt(num / den);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigen solve failed");
    const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(a + b + 2.0));
    Rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // x in [-1,1] -> u = (1+x)/2; weight (1-x)^a(1+x)^b dx = 2^{a+b+1} (1-u)^a u^b du.
    const double scale = std::exp(-(a + b + 1.0) * std::log(2.0));
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        r.nodes[i] = 0.5 * (1.0 + es.eigenvalues()(i));
        r.weights[i] = mu0 * v0 * v0 * scale;
    }
    return r;
}

template <class Key>
const Rule& cached(std::map<Key, std::unique_ptr<Rule>>& cache, std::mutex& m, const Key& key, auto&& build) {
    std::lock_guard lock(m);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<Rule>(build())).first;
    return *it->second;
}

}  // namespace

const Rule& gauss_legendre01(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre01: n >= 1");
    static std::map<int, std::unique_ptr<Rule>> cache;
    static std::mutex m;
    return cached(cache, m, n, [n] { return golub_welsch_jacobi(n, 0.0, 0.0); });
}

const Rule& gauss_jacobi01(int n, double p) {
    if (n < 1) throw std::invalid_argument("gauss_jacobi01: n >= 1");
    if (!(p > -1.0)) throw std::invalid_argument("gauss_jacobi01: exponent must exceed -1");
    static std::map<std::pair<int, double>, std::unique_ptr<Rule>> cache;
    static std::mutex m;
    return cached(cache, m, std::make_pair(n, p), [n, p] { return golub_welsch_jacobi(n, 0.0, p); });
}

}  // namespace schrolab::quad
