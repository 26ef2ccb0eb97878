#include "schrolab/oracle.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "schrolab/quadrature.hpp"
#include "schrolab/rng.hpp"
#include "schrolab/stats.hpp"
#include "schrolab/theory.hpp"

namespace schrolab::oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void enumerate(std::vector<int>& free_vertices, std::vector<std::pair<int, int>>& edges, std::vector<Pairing>& out) {
    if (free_vertices.empty()) {
        out.push_back({edges});
        return;
    }
    const int first = free_vertices.front();
    for (std::size_t j = 1; j < free_vertices.size(); ++j) {
        const int partner = free_vertices[j];
        std::vector<int> rest;
        rest.reserve(free_vertices.size() - 2);
        for (std::size_t i = 1; i < free_vertices.size(); ++i)
            if (i != j) rest.push_back(free_vertices[i]);
        edges.emplace_back(first, partner);
        enumerate(rest, edges, out);
        edges.pop_back();
    }
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// F(z, t) = t/z - (1 - e^{-z t}) / z^2 = int_0^t (t - tau) e^{-z tau} dtau
std::complex<double> time_kernel(std::complex<double> z, double t) {
    const std::complex<double> zt = z * t;
    if (std::abs(zt) < 1e-2) {
        // t^2 sum_{n>=0} (-zt)^n / (n+2)!
        std::complex<double> s = 0.0, p = 1.0;
        double f = 2.0;
        for (int n = 0; n < 8; ++n) {
            s += p / f;
            p *= -zt;
            f *= (n + 3);
        }
        return t * t * s;
    }
    return t / z - (1.0 - std::exp(-zt)) / (z * z);
}

// Exact sampler for (x, y) in [0,t]^2 with density |x - y|^{-a} / Z.
struct EdgeSampler {
    double a, t;
    std::pair<double, double> operator()(SequentialRng& rng) const {
        // |x - y| = t u with u ~ Beta(1 - a, 2): propose Beta(1 - a, 1), accept with prob 1 - u.
        double u;
        do {
            u = std::pow(rng.uniform(), 1.0 / (1.0 - a));
        } while (rng.uniform() >= 1.0 - u);
        const double gap = t * u;
        const double low = rng.uniform() * (t - gap);
        return rng.uniform() < 0.5 ? std::make_pair(low + gap, low) : std::make_pair(low, low + gap);
    }
};

bool in_product_simplex(const std::vector<double>& times, const VertexLayout& layout) {
    int v = 0;
    for (int order : layout.orders) {
        for (int i = 1; i < order; ++i)
            if (times[v + i] > times[v + i - 1]) return false;
        v += order;
    }
    return true;
}

// Monte Carlo of E[indicator * prod weight(gap_e)] under the edge sampler.
TermEstimate mc_simplex(const Pairing& p, const VertexLayout& layout, double a, double t, const McOptions& opt,
                        const std::function<double(double)>* weight) {
    if (opt.samples < opt.batches || opt.batches < 2) throw std::invalid_argument("mc: need samples >= batches >= 2");
    const EdgeSampler sampler{a, t};
    std::vector<double> batch_means(opt.batches, 0.0);
    const std::size_t per_batch = opt.samples / opt.batches;
    std::vector<double> times(layout.vertex_count());
    for (std::size_t b = 0; b < opt.batches; ++b) {
        SequentialRng rng(RngStream(opt.seed, b, StreamPurpose::OracleMc));
        double acc = 0.0;
        for (std::size_t s = 0; s < per_batch; ++s) {
            double w = 1.0;
            for (const auto& [l, r] : p.edges) {
                const auto [x, y] = sampler(rng);
                times[l] = x;
                times[r] = y;
                if (weight) w *= (*weight)(std::abs(x - y));
            }
            if (in_product_simplex(times, layout)) acc += w;
        }
        batch_means[b] = acc / static_cast<double>(per_batch);
    }
    const auto m = stats::real_mean(batch_means);
    return {m.mean, m.stderr_, per_batch * opt.batches};
}

void check_pairing(const Pairing& p, const VertexLayout& layout) {
    if (2 * p.order() != layout.vertex_count()) throw std::invalid_argument("pairing does not match the vertex layout");
    std::vector<int> seen(layout.vertex_count(), 0);
    for (const auto& [l, r] : p.edges) {
        if (l < 0 || r < 0 || l >= layout.vertex_count() || r >= layout.vertex_count() || l == r)
            throw std::invalid_argument("pairing has an invalid edge");
        ++seen[l];
        ++seen[r];
    }
    for (int s : seen)
        if (s != 1) throw std::invalid_argument("not a perfect matching");
}

}  // namespace

std::vector<Pairing> pairings(int two_k) {
    if (two_k < 0 || two_k % 2 != 0) throw std::invalid_argument("pairings: vertex count must be even");
    if (two_k > 12) throw std::invalid_argument("pairings: at most 12 vertices");
    std::vector<int> vs(two_k);
    for (int i = 0; i < two_k; ++i) vs[i] = i;
    std::vector<Pairing> out;
    std::vector<std::pair<int, int>> edges;
    enumerate(vs, edges, out);
    return out;
}

VertexLayout VertexLayout::single(int two_k) { return {{two_k}, {false}}; }

VertexLayout VertexLayout::product(std::span<const int> m_orders, std::span<const int> n_orders) {
    VertexLayout l;
    for (int m : m_orders) {
        if (m < 0) throw std::invalid_argument("layout: negative order");
        l.orders.push_back(m);
        l.conjugated.push_back(false);
    }
    for (int n : n_orders) {
        if (n < 0) throw std::invalid_argument("layout: negative order");
        l.orders.push_back(n);
        l.conjugated.push_back(true);
    }
    return l;
}

int VertexLayout::vertex_count() const noexcept {
    int s = 0;
    for (int o : orders) s += o;
    return s;
}

int VertexLayout::factor_of(int vertex) const {
    int v = vertex;
    for (std::size_t f = 0; f < orders.size(); ++f) {
        if (v < orders[f]) return static_cast<int>(f);
        v -= orders[f];
    }
    throw std::out_of_range("factor_of: vertex outside layout");
}

bool is_crossing(const Pairing& p, const VertexLayout& layout) {
    for (const auto& [l, r] : p.edges)
        if (layout.conjugated[layout.factor_of(l)] != layout.conjugated[layout.factor_of(r)]) return true;
    return false;
}

bool is_factor_local(const Pairing& p, const VertexLayout& layout) {
    for (const auto& [l, r] : p.edges)
        if (layout.factor_of(l) != layout.factor_of(r)) return false;
    return true;
}

TermEstimate limit_term(const MediumSpec& spec, const Pairing& p, const VertexLayout& layout, double t,
                        const McOptions& opt) {
    if (!(t > 0.0)) throw std::invalid_argument("limit_term: t must be positive");
    check_pairing(p, layout);
    const int k = p.order();
    const double a = exponents(spec).singular_exponent;
    const double c = spec.cutoff().amplitude_at_zero * k1(spec) / std::pow(kTwoPi, spec.d());
    const double cz = c * pair_kernel_mass(a, t);
    if (k == 0) return {1.0, 0.0, 0};
    if (k == 1) {
        const auto [l, r] = p.edges.front();
        const double frac = layout.factor_of(l) == layout.factor_of(r) ? 0.5 : 1.0;
        return {cz * frac, 0.0, 0};
    }
    const auto est = mc_simplex(p, layout, a, t, opt, nullptr);
    const double scale = std::pow(cz, k);
    return {scale * est.value, scale * est.error, est.samples};
}

TermEstimate limit_term(const MediumSpec& spec, const Pairing& p, double t, const McOptions& opt) {
    return limit_term(spec, p, VertexLayout::single(2 * p.order()), t, opt);
}

TermEstimate limit_term_xi(const MediumSpec& spec, const Pairing& p, const VertexLayout& layout, double t,
                           std::span<const double> xi, const McOptions& opt) {
    if (!(spec.beta() > 0.5)) throw std::invalid_argument("limit_term_xi: requires beta > 1/2");
    if (!(t > 0.0)) throw std::invalid_argument("limit_term_xi: t must be positive");
    if (static_cast<int>(xi.size()) != spec.d()) throw std::invalid_argument("limit_term_xi: xi dimension");
    check_pairing(p, layout);
    const int k = p.order();
    if (k == 0) return {1.0, 0.0, 0};
    const double a = exponents(spec).singular_exponent;
    const double e = 1.0 - 1.0 / (2.0 * spec.beta());
    double x = 0.0;
    for (double v : xi) x += v * v;
    x = std::sqrt(x);
    const double a0 = spec.cutoff().amplitude_at_zero;
    if (k == 1) {
        auto f = [&](double tau) { return (t - tau) * k2_radial(spec, x * std::pow(tau, e)); };
        const double one = a0 * quad::graded_singular(f, -a, t, 14, 0.15, 24);
        const auto [l, r] = p.edges.front();
        return {layout.factor_of(l) == layout.factor_of(r) ? one : 2.0 * one, 0.0, 0};
    }
    const double r_max = std::max(x * std::pow(t, e), 1e-12);
    const K2Table table(spec, r_max);
    const std::function<double(double)> w = [&](double gap) { return a0 * table(x * std::pow(gap, e)); };
    const auto est = mc_simplex(p, layout, a, t, opt, &w);
    const double scale = std::pow(pair_kernel_mass(a, t), k);
    return {scale * est.value, scale * est.error, est.samples};
}

TermEstimate limit_term_xi(const MediumSpec& spec, const Pairing& p, double t, std::span<const double> xi,
                           const McOptions& opt) {
    return limit_term_xi(spec, p, VertexLayout::single(2 * p.order()), t, xi, opt);
}

namespace {

void order_tuples(int slots, int total, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slots == 0) {
        if (total == 0) out.push_back(cur);
        return;
    }
    if (slots == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int m = 0; m <= total; ++m) {
        cur.push_back(m);
        order_tuples(slots - 1, total - m, cur, out);
        cur.pop_back();
    }
}

}  // namespace

std::complex<double> moment_partial_sum(const MediumSpec& spec, int M, int N, double t, int K_max, SeriesMode mode,
                                        std::span<const double> xi, std::complex<double> phi0_hat) {
    if (M < 0 || N < 0) throw std::invalid_argument("moment_partial_sum: M, N must be non-negative");
    if (K_max < 0 || K_max > 4) throw std::invalid_argument("moment_partial_sum: K_max must lie in 0..4");
    if (!(t > 0.0)) throw std::invalid_argument("moment_partial_sum: t must be positive");
    if (mode == SeriesMode::FiniteEps)
        throw std::invalid_argument("moment_partial_sum: finite-eps terms are only available at k = 1");
    if (mode == SeriesMode::LimitXiPhase && !(spec.beta() > 0.5))
        throw std::invalid_argument("moment_partial_sum: xi-phase series requires beta > 1/2");

    const auto ex = exponents(spec);
    double z;  // symmetrized pair integral over [0,t]^2 including constants
    if (mode == SeriesMode::LimitXiPhase) {
        if (static_cast<int>(xi.size()) != spec.d()) throw std::invalid_argument("moment_partial_sum: xi dimension");
        const auto one = pairings(2).front();
        z = limit_term_xi(spec, one, VertexLayout::product(std::vector<int>{1}, std::vector<int>{1}), t, xi).value;
    } else {
        z = spec.cutoff().amplitude_at_zero * k1(spec) / std::pow(kTwoPi, spec.d()) *
            pair_kernel_mass(ex.singular_exponent, t);
    }

    const std::complex<double> minus_i(0.0, -1.0), plus_i(0.0, 1.0);
    std::complex<double> total = 0.0;
    for (int k = 0; k <= K_max; ++k) {
        const auto all = pairings(2 * k);
        std::vector<std::vector<int>> tuples;
        std::vector<int> cur;
        order_tuples(M + N, 2 * k, cur, tuples);
        if (M + N == 0 && k > 0) continue;
        for (const auto& tup : tuples) {
            const std::vector<int> m(tup.begin(), tup.begin() + M), n(tup.begin() + M, tup.end());
            const auto layout = VertexLayout::product(m, n);
            std::size_t count = 0;
            for (const auto& p : all)
                if (mode != SeriesMode::LimitHomogenized || is_factor_local(p, layout)) ++count;
            if (count == 0) continue;
            std::complex<double> pref = 1.0;
            double denom = 1.0;
            for (int v : m) {
                pref *= std::pow(minus_i, v);
                denom *= factorial(v);
            }
            for (int v : n) {
                pref *= std::pow(plus_i, v);
                denom *= factorial(v);
            }
            total += pref * static_cast<double>(count) * std::pow(z, k) / denom;
        }
    }
    return total * std::pow(phi0_hat, M) * std::pow(std::conj(phi0_hat), N);
}

namespace {

// Integral over w in R of |w|^{1 - 2 gamma} f(w) dw with w = +-v^c, c = 1/(2 - 2 gamma), over |w| <= W
// (W = infinity allowed), using Gauss-Kronrod panels in v.
template <class F>
std::complex<double> radial_line_integral(double gamma, double W, F&& f) {
    const double c = 1.0 / (2.0 - 2.0 * gamma);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    std::complex<double> total = 0.0;
    for (int sgn : {1, -1}) {
        auto g_re = [&](double v) { return c * f(sgn * std::pow(v, c)).real(); };
        auto g_im = [&](double v) { return c * f(sgn * std::pow(v, c)).imag(); };
        if (std::isfinite(W)) {
            const double V = std::pow(W, 1.0 / c);
            const int panels = 96;
            for (int i = 0; i < panels; ++i) {
                // geometric near 0, uniform elsewhere
                const double lo = V * (i == 0 ? 0.0 : std::pow(static_cast<double>(i) / panels, 2.0));
                const double hi = V * std::pow(static_cast<double>(i + 1) / panels, 2.0);
                total += std::complex<double>(GK::integrate(g_re, lo, hi, 10, 1e-13), GK::integrate(g_im, lo, hi, 10, 1e-13));
            }
        } else {
            boost::math::quadrature::exp_sinh<double> es;
            const double head_end = 64.0;
            for (int i = 0; i < 64; ++i) {
                const double lo = head_end * i / 64.0, hi = head_end * (i + 1) / 64.0;
                total += std::complex<double>(GK::integrate(g_re, lo, hi, 10, 1e-13), GK::integrate(g_im, lo, hi, 10, 1e-13));
            }
            total += std::complex<double>(es.integrate(g_re, head_end, std::numeric_limits<double>::infinity(), 1e-13),
                                          es.integrate(g_im, head_end, std::numeric_limits<double>::infinity(), 1e-13));
        }
    }
    return total;
}

}  // namespace

std::complex<double> finite_eps_first_term(const MediumSpec& spec, double eps, double alpha, double t, double xi,
                                           std::complex<double> phi0_hat, const FirstTermOptions& opt) {
    if (spec.d() != 1) throw std::invalid_argument("finite_eps_first_term: only d = 1 is implemented");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("finite_eps_first_term: eps must lie in (0,1]");
    if (!(alpha > 0.0)) throw std::invalid_argument("finite_eps_first_term: alpha must be positive");
    if (!(t >= 0.0)) throw std::invalid_argument("finite_eps_first_term: t must be non-negative");
    if (t == 0.0) return 0.0;
    const auto ex = exponents(spec);
    const double drift = opt.suppress_phase ? 0.0 : std::pow(eps, alpha + ex.alpha_c - ex.kappa) * xi;
    const double curv = opt.suppress_phase ? 0.0 : 0.5 * std::pow(eps, 2.0 * ex.alpha_c - ex.kappa);
    const double ea = std::pow(eps, ex.alpha_c);
    const Cutoff cut = spec.cutoff();
    const double W = opt.frozen_cutoff ? std::numeric_limits<double>::infinity() : cut.p_max / ea;
    const double a0 = cut.amplitude_at_zero;
    auto f = [&](double w) -> std::complex<double> {
        if (!(std::abs(w) < 1e150)) return 0.0;  // kernel decays like 1/|z|
        const double amp = opt.frozen_cutoff ? a0 : cut(ea * std::abs(w));
        const std::complex<double> z(spec.mu() * std::pow(std::abs(w), 2.0 * spec.beta()), -(drift * w - curv * w * w));
        return amp * time_kernel(z, t);
    };
    return -phi0_hat * radial_line_integral(spec.gamma(), W, f) / kTwoPi;
}

double finite_eps_crossing_term(const MediumSpec& spec, double eps, double alpha, double t, double xi,
                                const InitialPacket& packet) {
    if (spec.d() != 1) throw std::invalid_argument("finite_eps_crossing_term: only d = 1 is implemented");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("finite_eps_crossing_term: eps must lie in (0,1]");
    packet.validate(1);
    const auto ex = exponents(spec);
    const double drift = std::pow(eps, alpha + ex.alpha_c - ex.kappa) * xi;
    const double curv = 0.5 * std::pow(eps, 2.0 * ex.alpha_c - ex.kappa);
    const double ea = std::pow(eps, ex.alpha_c);
    const double shift = std::pow(eps, ex.alpha_c - alpha);
    const Cutoff cut = spec.cutoff();
    auto f = [&](double w) {
        const std::complex<double> z(spec.mu() * std::pow(std::abs(w), 2.0 * spec.beta()), -(drift * w - curv * w * w));
        const double q[1] = {xi - shift * w};
        const double amp = cut(ea * std::abs(w)) * std::norm(packet.fourier(q));
        return std::complex<double>(amp * 2.0 * time_kernel(z, t).real(), 0.0);
    };
    return radial_line_integral(spec.gamma(), cut.p_max / ea, f).real() / kTwoPi;
}

double uniform_bound_integral(const MediumSpec& spec, double eps, double t) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("uniform_bound_integral: eps must lie in (0,1]");
    if (!(t >= 0.0)) throw std::invalid_argument("uniform_bound_integral: t must be non-negative");
    if (t == 0.0) return 0.0;
    const auto ex = exponents(spec);
    const double a = ex.singular_exponent;
    const Cutoff cut = spec.cutoff();
    const double pref = sphere_area(spec.d()) / std::pow(kTwoPi, spec.d());
    if (cut.kind == CutoffKind::SharpBall) {
        const double x_scale = spec.mu() * std::pow(cut.p_max, 2.0 * spec.beta()) / std::pow(eps, ex.kappa);
        auto f = [&](double tau) {
            return 2.0 * (t - tau) * std::tgamma(a) * boost::math::gamma_p(a, x_scale * tau);
        };
        const double inner = quad::graded_singular(f, -a, t, 16, 0.2, 24);
        return cut.amplitude_at_zero * pref / (2.0 * spec.beta()) * std::pow(spec.mu(), -a) * inner;
    }
    // General cutoff: the time integral is analytic, leaving a radial integral.
    const double ea = std::pow(eps, ex.alpha_c);
    const double W = cut.p_max / ea;
    const double c = 1.0 / (2.0 - 2.0 * spec.gamma());
    auto g = [&](double v) {
        const double rho = std::pow(v, c);
        return c * cut(ea * rho) * 2.0 * time_kernel({spec.mu() * std::pow(rho, 2.0 * spec.beta()), 0.0}, t).real();
    };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double V = std::pow(W, 1.0 / c);
    double s = 0.0;
    const int panels = 64;
    for (int i = 0; i < panels; ++i) s += GK::integrate(g, V * i / panels, V * (i + 1) / panels, 10, 1e-13);
    return pref * s;
}

}  // namespace schrolab::oracle
