#include "cfaging/detequiv.hpp"

#include "cfaging/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cfaging {

LargeScaleProfile make_profile(const RMatrix& beta, const RMatrix& a, const RMatrix& rho, const RVector& energy,
                               int antennas, double noise_power, int time)
{
    LargeScaleProfile lsp;
    const auto rho2 = rho.array().square();
    const auto a2 = a.array().square();
    lsp.zeta = (beta.array() * a2 * rho2).matrix();
    lsp.zeta_check = (beta.array() * (1.0 - a2).max(0.0) * rho2).matrix();
    lsp.zeta_dot = (beta.array() * (1.0 - rho2).max(0.0)).matrix();
    lsp.energy = energy;
    lsp.psi = (lsp.zeta_check + lsp.zeta_dot) * energy + RVector::Constant(beta.rows(), noise_power);
    lsp.antennas = antennas;
    lsp.noise_power = noise_power;
    lsp.time = time;
    return lsp;
}

LargeScaleProfile build_profile(const Deployment& dep, const RMatrix& a, const CorrelationProfile& profile,
                                const ScenarioConfig& cfg, int n)
{
    if (n <= cfg.pilot_len || n > cfg.frame_len) {
        throw std::out_of_range("build_profile: time index must lie in (P, T]");
    }
    const RVector energy = Eigen::Map<const RVector>(cfg.data_energy.data(), cfg.num_ues);
    return make_profile(dep.beta, a, profile.rho_matrix(n - cfg.pilot_len), energy, cfg.antennas_per_ap,
                        cfg.noise_power, n);
}

namespace {

// phi_m = (sum_{i in active} E_i zeta_mi / (1 + e_i) + psi_m)^{-1}
RVector resolvent_diagonal(const LargeScaleProfile& lsp, const std::vector<int>& active, const RVector& e)
{
    RVector denom = lsp.psi;
    for (int i : active) {
        denom += (lsp.energy(i) / (1.0 + e(i))) * lsp.zeta.col(i);
    }
    return denom.cwiseInverse();
}

double trace_weight(const LargeScaleProfile& lsp, int l, const RVector& phi)
{
    return lsp.antennas * lsp.energy(l) * lsp.zeta.col(l).dot(phi);
}

}  // namespace

FixedPointState fixed_point(const LargeScaleProfile& lsp, const std::vector<int>& excluded, const DeOptions& options)
{
    const int k_count = lsp.num_ues();
    FixedPointState st;
    for (int l = 0; l < k_count; ++l) {
        if (std::find(excluded.begin(), excluded.end(), l) == excluded.end()) st.active.push_back(l);
    }
    st.e = RVector::Constant(k_count, 1.0 / lsp.noise_power);

    RVector next = st.e;
    for (st.iterations = 1; st.iterations <= options.max_iterations; ++st.iterations) {
        st.phi = resolvent_diagonal(lsp, st.active, st.e);
        double scale = 1.0;
        st.residual = 0.0;
        for (int l : st.active) {
            next(l) = trace_weight(lsp, l, st.phi);
            st.residual = std::max(st.residual, std::abs(next(l) - st.e(l)));
            scale = std::max(scale, std::abs(next(l)));
        }
        st.e = next;
        if (st.residual <= options.tol * scale) {
            st.converged = true;
            break;
        }
    }
    if (!st.converged) {
        throw DetEquivError("fixed_point", "no convergence after " + std::to_string(options.max_iterations) +
                                               " iterations (residual " + std::to_string(st.residual) + ")");
    }
    st.phi = resolvent_diagonal(lsp, st.active, st.e);
    for (int l : excluded) {
        st.e(l) = trace_weight(lsp, l, st.phi);
    }
    return st;
}

FixedPointState fixed_point_e(const LargeScaleProfile& lsp, int k, const DeOptions& options)
{
    return fixed_point(lsp, {k}, options);
}

DerivativeWeights derivative_weights(const LargeScaleProfile& lsp, const FixedPointState& state,
                                     const RVector& a_weights, bool literal)
{
    const auto& act = state.active;
    const auto dim = static_cast<Eigen::Index>(act.size());
    const RVector phi2 = state.phi.cwiseAbs2();
    const double n_ant = lsp.antennas;

    RMatrix j(dim, dim);
    RVector u(dim);
    for (Eigen::Index p = 0; p < dim; ++p) {
        const int ip = act[static_cast<std::size_t>(p)];
        const RVector w = lsp.zeta.col(ip).cwiseProduct(phi2);
        u(p) = lsp.energy(ip) * n_ant * w.dot(a_weights);
        for (Eigen::Index q = 0; q < dim; ++q) {
            const int iq = act[static_cast<std::size_t>(q)];
            const double d = 1.0 + state.e(iq);
            j(p, q) = lsp.energy(ip) * lsp.energy(iq) * n_ant * w.dot(lsp.zeta.col(iq)) / (d * d);
        }
    }
    RVector sol;
    const RMatrix system = RMatrix::Identity(dim, dim) - j;
    if (literal) {
        sol = system * u;
    } else {
        try {
            sol = solve_general(system, u);
        } catch (const NumericalError& err) {
            throw DetEquivError("e_prime_solve", err.what());
        }
    }

    DerivativeWeights out;
    out.e_prime = RVector::Zero(lsp.num_ues());
    RVector inner = a_weights;
    for (Eigen::Index p = 0; p < dim; ++p) {
        const int ip = act[static_cast<std::size_t>(p)];
        out.e_prime(ip) = sol(p);
        const double d = 1.0 + state.e(ip);
        inner += (lsp.energy(ip) * sol(p) / (d * d)) * lsp.zeta.col(ip);
    }
    out.phi_prime = phi2.cwiseProduct(inner);
    return out;
}

DerivativeWeights e_prime_solve(const LargeScaleProfile& lsp, int k, const FixedPointState& state)
{
    return derivative_weights(lsp, state, lsp.zeta.col(k));
}

CombinerState solve_combiner_state(const LargeScaleProfile& lsp, int k, const DeOptions& options)
{
    CombinerState st;
    st.k = k;
    st.fp = fixed_point_e(lsp, k, options);
    st.prime = e_prime_solve(lsp, k, st.fp);
    const bool literal = options.dotted_solve == DottedSolve::Literal;
    for (int l = 0; l < lsp.num_ues(); ++l) {
        if (l == k) continue;
        DottedState d;
        d.l = l;
        if (options.dotted_fixed_point == DottedFixedPoint::LeaveTwoOut) {
            d.fp = fixed_point(lsp, {k, l}, options);
        } else {
            d.fp = st.fp;
            d.fp.active.erase(std::find(d.fp.active.begin(), d.fp.active.end(), l));
            d.fp.phi = resolvent_diagonal(lsp, d.fp.active, d.fp.e);
        }
        d.coupling = trace_weight(lsp, l, d.fp.phi);
        d.weights = derivative_weights(lsp, d.fp, lsp.zeta.col(k), literal);
        st.dotted.push_back(std::move(d));
    }
    return st;
}

namespace {

RVector phi_prime_from(const LargeScaleProfile& lsp, int k, const FixedPointState& fp, const RVector& e_prime)
{
    RVector inner = lsp.zeta.col(k);
    for (int p : fp.active) {
        const double d = 1.0 + fp.e(p);
        inner += (lsp.energy(p) * e_prime(p) / (d * d)) * lsp.zeta.col(p);
    }
    return fp.phi.cwiseAbs2().cwiseProduct(inner);
}

}  // namespace

CombinerState rebind_combiner_state(const LargeScaleProfile& lsp, const CombinerState& frozen)
{
    CombinerState st = frozen;
    st.prime.phi_prime = phi_prime_from(lsp, st.k, st.fp, st.prime.e_prime);
    for (auto& d : st.dotted) d.weights.phi_prime = phi_prime_from(lsp, st.k, d.fp, d.weights.e_prime);
    return st;
}

double eta_s(const LargeScaleProfile& lsp, int k, const RVector& phi)
{
    const double s = lsp.zeta.col(k).dot(phi);
    return lsp.antennas * lsp.energy(k) * lsp.energy(k) * s * s;
}

NoiseLikeTerms eta_2_3_w(const LargeScaleProfile& lsp, int k, const RVector& phi_prime)
{
    NoiseLikeTerms out;
    const double ek = lsp.energy(k);
    out.eta_2 = ek * phi_prime.dot(lsp.zeta_check * lsp.energy);
    out.eta_3 = ek * phi_prime.dot(lsp.zeta_dot * lsp.energy);
    out.eta_w = lsp.noise_power * ek * phi_prime.sum();
    return out;
}

namespace {

// 1 + x^2 - 2x with x = b / (1 + b), written term by term.
double epsilon_factor(double b, long* clamp_events)
{
    const double x = b / (1.0 + b);
    double f = 1.0 + x * x - 2.0 * x;
    if (f < 0.0) {
        f = 0.0;
        if (clamp_events) ++*clamp_events;
    }
    return f;
}

}  // namespace

double eta_1(const LargeScaleProfile& lsp, int k, const std::vector<DottedState>& dotted, const DeOptions& options,
             long* clamp_events)
{
    double total = 0.0;
    for (const auto& d : dotted) {
        const int l = d.l;
        const RVector weighted = lsp.zeta.col(l).cwiseProduct(d.weights.phi_prime);
        if (options.epsilon == EpsilonReading::Aggregate) {
            total += lsp.energy(l) * weighted.sum() * epsilon_factor(d.coupling, clamp_events);
        } else {
            for (Eigen::Index m = 0; m < weighted.size(); ++m) {
                const double b_m = lsp.antennas * lsp.energy(l) * lsp.zeta(m, l) * d.fp.phi(m);
                total += lsp.energy(l) * weighted(m) * epsilon_factor(b_m, clamp_events);
            }
        }
    }
    return lsp.energy(k) * total;
}

SinrBreakdown evaluate_eta_terms(const LargeScaleProfile& lsp, const CombinerState& state, const DeOptions& options,
                                 long* clamp_events)
{
    SinrBreakdown out;
    out.eta_s = eta_s(lsp, state.k, state.fp.phi);
    const NoiseLikeTerms rest = eta_2_3_w(lsp, state.k, state.prime.phi_prime);
    out.eta_2 = rest.eta_2;
    out.eta_3 = rest.eta_3;
    out.eta_w = rest.eta_w;
    out.eta_1 = eta_1(lsp, state.k, state.dotted, options, clamp_events);
    return out;
}

DetEquivResult det_equiv_sinr(const LargeScaleProfile& lsp, int k, const DeOptions& options)
{
    if (k < 0 || k >= lsp.num_ues()) {
        throw std::out_of_range("det_equiv_sinr: user index out of range");
    }
    DetEquivResult out;
    const CombinerState st = solve_combiner_state(lsp, k, options);
    out.terms = evaluate_eta_terms(lsp, st, options, &out.clamp_events);
    out.sinr = out.terms.sinr();
    out.max_iterations = st.fp.iterations;
    for (const auto& d : st.dotted) out.max_iterations = std::max(out.max_iterations, d.fp.iterations);
    return out;
}

ExperimentResult run_det_equiv(const ScenarioConfig& cfg, const MonteCarloPlan& plan, const DeOptions& options)
{
    validate(cfg);
    if (plan.drops < 1) throw std::invalid_argument("run_det_equiv: drops must be >= 1");
    const std::vector<int> probes =
        plan.probe_times.empty() ? default_probe_times(cfg.pilot_len, cfg.frame_len) : plan.probe_times;
    const auto start = std::chrono::steady_clock::now();

    const auto drops = static_cast<std::size_t>(plan.drops);
    std::vector<RMatrix> per_drop(drops);
    std::vector<long> clamps(drops, 0);
    std::vector<int> iterations(drops, 0);
    parallel_for(drops, plan.threads, [&](std::size_t d) {
        RngStream rng(plan.seed, drop_stream(static_cast<int>(d)));
        const Deployment dep = drop_uniform(cfg, rng);
        const CorrelationProfile profile(cfg, dep);
        const RMatrix a = estimation_coefficients(dep, cfg, profile);
        RMatrix out(static_cast<Eigen::Index>(probes.size()), cfg.num_ues);
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const LargeScaleProfile lsp = build_profile(dep, a, profile, cfg, probes[i]);
            for (int k = 0; k < cfg.num_ues; ++k) {
                const DetEquivResult r = det_equiv_sinr(lsp, k, options);
                out(static_cast<Eigen::Index>(i), k) = r.sinr;
                clamps[d] += r.clamp_events;
                iterations[d] = std::max(iterations[d], r.max_iterations);
            }
        }
        per_drop[d] = std::move(out);
    });

    RMatrix total = RMatrix::Zero(static_cast<Eigen::Index>(probes.size()), cfg.num_ues);
    for (const auto& m : per_drop) total += m;
    total /= plan.drops;

    ExperimentResult result;
    result.engine = "detequiv";
    result.axis.assign(probes.begin(), probes.end());
    result.sinr = total;
    long clamp_total = 0;
    for (long c : clamps) clamp_total += c;
    const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.metadata = {{"engine", "detequiv"},
                       {"seed", plan.seed},
                       {"drops", plan.drops},
                       {"probe_times", probes},
                       {"epsilon_clamp_events", clamp_total},
                       {"max_fixed_point_iterations", *std::max_element(iterations.begin(), iterations.end())},
                       {"runtime_s", runtime}};
    return result;
}

}  // namespace cfaging
