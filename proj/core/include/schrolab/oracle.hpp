#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "schrolab/medium.hpp"
#include "schrolab/solver.hpp"

namespace schrolab::oracle {

// Perfect matching of vertices 0 .. 2k-1; each edge stored with first < second.
struct Pairing {
    std::vector<std::pair<int, int>> edges;
    int order() const noexcept { return static_cast<int>(edges.size()); }  // k
};

// All (2k-1)!! pairings, in lexicographic order. Requires 2k even and <= 12.
std::vector<Pairing> pairings(int two_k);

// Vertices are laid out factor by factor: the M unconjugated factors first, then the N
// conjugated ones. Factor f owns orders[f] consecutive vertices, ordered by decreasing time.
struct VertexLayout {
    std::vector<int> orders;
    std::vector<bool> conjugated;

    static VertexLayout single(int two_k);  // one unconjugated factor (first moment)
    static VertexLayout product(std::span<const int> m_orders, std::span<const int> n_orders);
    int vertex_count() const noexcept;
    int factor_of(int vertex) const;
};

bool is_crossing(const Pairing& p, const VertexLayout& layout);     // joins a plain and a conjugated factor
bool is_factor_local(const Pairing& p, const VertexLayout& layout); // every edge inside one factor

struct McOptions {
    std::size_t samples = 1u << 22;
    std::size_t batches = 64;
    std::uint64_t seed = 12345;
};

struct TermEstimate {
    double value = 0.0;
    double error = 0.0;  // batch-means standard error; 0 for deterministic evaluations
    std::size_t samples = 0;
};

// C^k int over the product simplex of prod_edges |v_l - v_r|^{-a}, with C = a(0) K1 / (2 pi)^d.
// k = 1 is evaluated exactly; k >= 2 by Monte Carlo with exact edge sampling.
TermEstimate limit_term(const MediumSpec& spec, const Pairing& p, const VertexLayout& layout, double t,
                        const McOptions& opt = {});
TermEstimate limit_term(const MediumSpec& spec, const Pairing& p, double t, const McOptions& opt = {});

// a(0)^k int over the product simplex of prod_edges |v_l - v_r|^{-a} K2(|v_l - v_r|, xi). Requires beta > 1/2.
TermEstimate limit_term_xi(const MediumSpec& spec, const Pairing& p, const VertexLayout& layout, double t,
                           std::span<const double> xi, const McOptions& opt = {});
TermEstimate limit_term_xi(const MediumSpec& spec, const Pairing& p, double t, std::span<const double> xi,
                           const McOptions& opt = {});

enum class SeriesMode {
    LimitNoPhase,      // all pairings, kernel |s-u|^{-a} (regime iii)
    LimitXiPhase,      // all pairings, kernel |s-u|^{-a} K2(|s-u|, xi) (regime iv)
    LimitHomogenized,  // factor-local pairings only (regime i)
    FiniteEps,         // not available for partial sums
};

// sum_{k <= K_max} of the order-2k terms of E[psi^M conj(psi)^N], assembled from explicitly
// enumerated admissible pairings and the symmetrized simplex integral.
std::complex<double> moment_partial_sum(const MediumSpec& spec, int M, int N, double t, int K_max, SeriesMode mode,
                                        std::span<const double> xi = {}, std::complex<double> phi0_hat = 1.0);

struct FirstTermOptions {
    bool suppress_phase = false;  // drop the dispersive phase
    bool frozen_cutoff = false;   // replace a(eps^{alpha_c} w) by a(0), integrate over all w
};

// k = 1 term of E psi_eps(t, xi) at finite eps (d = 1).
std::complex<double> finite_eps_first_term(const MediumSpec& spec, double eps, double alpha, double t, double xi,
                                           std::complex<double> phi0_hat, const FirstTermOptions& opt = {});

// k = 1 crossing contribution to E |psi_eps(t, xi)|^2 at finite eps (d = 1).
double finite_eps_crossing_term(const MediumSpec& spec, double eps, double alpha, double t, double xi,
                                const InitialPacket& packet);

// int_{[0,t]^2} int dw/(2 pi)^d a(eps^{alpha_c} w) |w|^{-(2 gamma + d - 2)} e^{-mu |w|^{2 beta} |s-u|}.
double uniform_bound_integral(const MediumSpec& spec, double eps, double t);

}  // namespace schrolab::oracle
