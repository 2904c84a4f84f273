// Acceptance criteria, one per invocation: `acceptance <id>` prints a single PASS/FAIL line.

#include "levyclt/edgeworth/expansion.hpp"
#include "levyclt/harness/experiments.hpp"
#include "levyclt/perturbation/inverse_map.hpp"
#include "levyclt/polycore/gaussian_moment.hpp"
#include "levyclt/polycore/hermite.hpp"
#include "levyclt/sampling/rng.hpp"
#include "levyclt/wasserstein/wasserstein.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace levyclt;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string config_path(const std::string& name) { return std::string(LEVYCLT_SOURCE_DIR) + "/configs/" + name; }

int worker_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

DenseMatrix<Rational> random_sigma(std::mt19937_64& gen, std::size_t q) {
    std::uniform_int_distribution<int> d(-3, 3);
    DenseMatrix<Rational> L(q, q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j <= i; ++j) L(i, j) = Scalar<Rational>::from_ratio(d(gen), 2);
    DenseMatrix<Rational> s = L * L.transpose();
    for (std::size_t i = 0; i < q; ++i) s(i, i) += Rational(1, 2);
    return s;
}

CumulantSet<Rational> random_cumulants(std::mt19937_64& gen, std::size_t q, int order) {
    std::uniform_int_distribution<int> d(-4, 4);
    const auto s = random_sigma(gen, q);
    IndexMap<Rational> mu;
    for (const auto& a : multi_indices_between(q, 2, order)) {
        if (a.order() == 2) {
            std::vector<std::size_t> idx;
            for (std::size_t j = 0; j < q; ++j)
                for (int e = 0; e < a[j]; ++e) idx.push_back(j);
            mu[a] = s(idx[0], idx[1]);
        } else {
            mu[a] = Scalar<Rational>::from_ratio(d(gen), 1 + std::abs(d(gen)));
        }
    }
    return CumulantSet<Rational>(q, order, mu);
}

Outcome slope_outcome(const ExperimentResult& r, double target, double tol, const std::string& extra = "") {
    const double s = r.metrics.at("slope");
    const bool ok = std::isfinite(s) && std::abs(s - target) <= tol;
    std::string d = "slope " + num(s) + " (95% CI " + num(r.metrics.at("ci_lo")) + ".." + num(r.metrics.at("ci_hi")) +
                    "), target " + num(target) + " +/- " + num(tol);
    if (!extra.empty()) d += "; " + extra;
    return {ok, d};
}

Outcome c1_worked_example() {
    const Config cfg = Config::from_file(config_path("edgeworth_worked.ini"));
    const auto r = run_edgeworth_build(cfg, {});
    const bool match = r.metrics.at("reference_match") == 1.0;
    std::string d = match ? "u_1 equals the closed form exactly"
                          : "u_1 differs from the closed form: " + r.notes.front() +
                                " (cubic part " + (r.metrics.at("reference_cubic_match") == 1.0 ? "matches" : "differs") +
                                "; the built u_1 has zero PDE residual)";
    return {match, d};
}

Outcome c2_pde_residuals() {
    std::mt19937_64 gen(2024);
    int sets = 0, nonzero = 0;
    for (std::size_t q = 1; q <= 3; ++q)
        for (int order = 3; order <= 5; ++order)
            for (int trial = 0; trial < 4; ++trial) {
                const int r = std::min(2, order - 2);
                const auto c = random_cumulants(gen, q, order);
                const auto Q = build_Q(c, r);
                const auto map = invert_S_map(Q, c.covariance());
                for (const auto& res : pde_residuals(map, Q))
                    if (!res.is_zero()) ++nonzero;
                ++sets;
            }
    return {nonzero == 0, std::to_string(sets) + " random rational sets (q <= 3, order <= 5, r <= 2), " +
                              std::to_string(nonzero) + " nonzero residuals"};
}

Outcome c3_moment_matching() {
    std::mt19937_64 gen(77);
    int checked = 0, bad = 0;
    for (std::size_t q = 1; q <= 2; ++q)
        for (int n = 3; n <= 5; ++n)
            for (int trial = 0; trial < 3; ++trial) {
                const auto c = random_cumulants(gen, q, n);
                const int r = n - 2;
                const auto Q = build_Q(c, r);
                GaussianMoments<Rational> gm(c.covariance());
                for (const Rational eps : {Rational(1, 2), Rational(1, 7)}) {
                    const auto target = cumulants_to_moments(c.scaled(eps));
                    for (const auto& a : multi_indices_between(q, 1, n)) {
                        Rational m = gm.moment(a), pw = 1;
                        for (int k = 0; k < r; ++k) {
                            pw *= eps;
                            m += pw * gm.expectation(Q[static_cast<std::size_t>(k)] * Polynomial<Rational>::monomial(a, Rational(1)));
                        }
                        ++checked;
                        if (m != target.value(a)) ++bad;
                    }
                }
            }
    return {bad == 0, std::to_string(checked) + " moments compared exactly (n <= 5, q <= 2), " + std::to_string(bad) + " mismatches"};
}

Outcome c4_pushforward_density() {
    CumulantSet<Rational> c(1, 3, IndexMap<Rational>{{MultiIndex{2}, Rational(1)}, {MultiIndex{3}, Rational(1)}});
    const auto map = invert_S_map(build_Q(c, 1), c.covariance()).cast<double>();
    const EdgeworthDensity ed(c, 1);
    std::vector<double> errs;
    for (double eps : {0.02, 0.01, 0.005}) {
        double worst = 0.0;
        for (int i = 0; i <= 1200; ++i) {
            const double y = -6.0 + 0.01 * i;
            const std::vector<double> yv{y};
            worst = std::max(worst, std::abs(pushforward_density_1d(map, eps, y) - ed(eps, yv)));
        }
        errs.push_back(worst);
    }
    const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    const bool ok = std::abs(r1 - 4.0) <= 0.5 && std::abs(r2 - 4.0) <= 0.5;
    return {ok, "sup errors " + num(errs[0]) + ", " + num(errs[1]) + ", " + num(errs[2]) + "; halving ratios " + num(r1) +
                    ", " + num(r2) + " (target 4 +/- 0.5)"};
}

Outcome c5_clt_rate() {
    const Config cfg = Config::from_file(config_path("clt_rate_exponential.ini"));
    RunOptions o;
    o.threads = worker_threads();
    const auto r = run_clt_rate(cfg, o);
    return slope_outcome(r, -0.5, 0.15, "population slope " + num(r.metrics.at("quantile_slope")));
}

Outcome c6_perturbed_rate() {
    const Config cfg = Config::from_file(config_path("clt_rate_perturbed.ini"));
    RunOptions o;
    o.threads = worker_threads();
    const auto r = run_clt_rate(cfg, o);
    return slope_outcome(r, -1.0, 0.25,
                         "mean distances " + num(r.metrics.at("mean_distance_16")) + ", " + num(r.metrics.at("mean_distance_64")) +
                             ", " + num(r.metrics.at("mean_distance_256")) + ", " + num(r.metrics.at("mean_distance_1024")) +
                             "; population (quantile) slope " + num(r.metrics.at("quantile_slope")));
}

Outcome c7_jump_coupling() {
    const Config cfg = Config::from_file(config_path("jump_coupling.ini"));
    RunOptions o;
    o.threads = worker_threads();
    const auto r = run_jump_coupling(cfg, o);
    return slope_outcome(r, 1.0, 0.3, "null-cloud slope " + num(r.metrics.at("null_slope")));
}

Outcome c8_sde_strong_error() {
    const Config cfg = Config::from_file(config_path("sde_convergence.ini"));
    RunOptions o;
    o.threads = worker_threads();
    const auto r = run_sde_convergence(cfg, o);
    return slope_outcome(r, 0.5, 0.2);
}

Outcome c9_oracle_equivalence() {
    int bad = 0;
    double worst = 0.0;
    for (std::uint64_t inst = 0; inst < 100; ++inst) {
        RngStream rng(909, inst);
        std::vector<double> x(500), y(500);
        const double shift = rng.uniform() * 2.0 - 1.0, scale = 0.5 + rng.uniform();
        for (auto& v : x) v = rng.normal();
        for (auto& v : y) v = shift + scale * (inst % 2 == 0 ? rng.normal() : rng.exponential());
        const double exact = wp_1d_exact(x, y, 2.0);
        const auto ot = wp_empirical(EmpiricalDistribution(1, x), EmpiricalDistribution(1, y), 2.0);
        const double diff = std::abs(ot.distance - exact);
        worst = std::max(worst, diff);
        if (!(diff <= 1e-10) || !ot.certified) ++bad;
    }
    return {bad == 0, "100 instances at n = 500, max |difference| " + num(worst) + ", " + std::to_string(bad) + " failures"};
}

Outcome c10_property_suites() {
    std::vector<std::string> failed;
    // H_j' = j H_{j-1}, H_{j+1} = x H_j - j H_{j-1}
    for (int j = 1; j <= 12; ++j) {
        const auto hj = hermite_1d<Rational>(j);
        if (!(hj.partial(0) == hermite_1d<Rational>(j - 1) * Rational(j))) failed.push_back("derivative H_" + std::to_string(j));
    }
    // E[H_a H_b] = a! delta_ab under N(0, 1)
    GaussianMoments<Rational> g1(DenseMatrix<Rational>::identity(1));
    for (int a = 0; a <= 8; ++a)
        for (int b = 0; b <= 8; ++b) {
            const Rational want = a == b ? Rational(factorial(MultiIndex{a})) : Rational(0);
            if (g1.inner(hermite_1d<Rational>(a), hermite_1d<Rational>(b)) != want)
                failed.push_back("orthogonality " + std::to_string(a) + "," + std::to_string(b));
        }
    // cumulants -> moments -> cumulants
    std::mt19937_64 gen(5);
    for (std::size_t q = 1; q <= 3; ++q)
        for (int order = 2; order <= 6; ++order) {
            const auto c = random_cumulants(gen, q, order);
            const auto back = moments_to_cumulants(cumulants_to_moments(c));
            if (back.values() != c.values()) failed.push_back("cumulant round trip q=" + std::to_string(q));
        }
    // p_k = grad u_k is curl-free
    for (std::size_t q = 2; q <= 3; ++q) {
        const auto c = random_cumulants(gen, q, 5);
        const auto map = invert_S_map(build_Q(c, 3), c.covariance());
        for (const auto& pk : map.gradients())
            if (!is_curl_free(pk)) failed.push_back("curl-free q=" + std::to_string(q));
    }
    // same (seed, stream) reproduces; neighbouring streams differ
    {
        RngStream a(42, derive_stream_id(3, 7, kPurposeLaw)), b(42, derive_stream_id(3, 7, kPurposeLaw));
        RngStream c(42, derive_stream_id(3, 8, kPurposeLaw));
        bool same = true, differs = false;
        for (int i = 0; i < 10000; ++i) {
            const auto va = a.next_u64(), vb = b.next_u64(), vc = c.next_u64();
            same = same && va == vb;
            differs = differs || va != vc;
        }
        if (!same) failed.push_back("rng reproducibility");
        if (!differs) failed.push_back("rng stream separation");
    }
    std::string d = "Hermite derivative/orthogonality, cumulant round trip, curl-free gradients, RNG reproducibility";
    if (!failed.empty()) {
        d += "; failed:";
        for (const auto& f : failed) d += " " + f;
    }
    return {failed.empty(), d};
}

struct Criterion {
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

const std::map<int, Criterion>& criteria() {
    static const std::map<int, Criterion> c{
        {1, {"worked-example u_1 exactness", 1.0, c1_worked_example}},
        {2, {"PDE residual suite", 30.0, c2_pde_residuals}},
        {3, {"moment matching", 30.0, c3_moment_matching}},
        {4, {"push-forward density consistency", 10.0, c4_pushforward_density}},
        {5, {"CLT rate m^-1/2", 300.0, c5_clt_rate}},
        {6, {"perturbed rate m^-1", 300.0, c6_perturbed_rate}},
        {7, {"small-jump coupling rate", 600.0, c7_jump_coupling}},
        {8, {"SDE strong error rate", 600.0, c8_sde_strong_error}},
        {9, {"oracle equivalence", 60.0, c9_oracle_equivalence}},
        {10, {"property suites", 60.0, c10_property_suites}},
    };
    return c;
}

int run_one(int id) {
    const auto it = criteria().find(id);
    if (it == criteria().end()) {
        std::fprintf(stderr, "unknown criterion %d\n", id);
        return 2;
    }
    const auto& crit = it->second;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = crit.run();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs <= crit.budget_s;
    const bool pass = out.pass && in_budget;
    std::printf("C%d %s: %s | %s | %.2fs (budget %.0fs%s)\n", id, pass ? "PASS" : "FAIL", crit.title, out.detail.c_str(), secs,
                crit.budget_s, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
    return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        int failures = 0;
        for (const auto& [id, c] : criteria()) failures += run_one(id);
        return failures == 0 ? 0 : 1;
    }
    int rc = 0;
    for (int i = 1; i < argc; ++i) rc |= run_one(std::atoi(argv[i]));
    return rc;
}
