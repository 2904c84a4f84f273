#include "levyclt/edgeworth/expansion.hpp"
#include "levyclt/harness/experiments.hpp"
#include "levyclt/levy/annulus.hpp"
#include "levyclt/levy/cramer.hpp"
#include "levyclt/perturbation/inverse_map.hpp"
#include "levyclt/sampling/samplers.hpp"
#include "levyclt/wasserstein/wasserstein.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace levyclt;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

EmpiricalDistribution cloud(const Array& a) {
    if (a.ndim() != 2) throw std::invalid_argument("expected an (n, q) array");
    const auto n = static_cast<std::size_t>(a.shape(0)), q = static_cast<std::size_t>(a.shape(1));
    return EmpiricalDistribution(q, std::vector<double>(a.data(), a.data() + n * q));
}

std::vector<double> flat(const Array& a) { return std::vector<double>(a.data(), a.data() + a.size()); }

CumulantSet<Rational> cumulants_from(std::size_t q, const std::map<std::vector<int>, std::string>& values) {
    IndexMap<Rational> mu;
    int order = 3;
    for (const auto& [idx, v] : values) {
        if (idx.size() != q) throw std::invalid_argument("cumulant index length must equal q");
        MultiIndex a(idx);
        order = std::max(order, a.order());
        mu[a] = parse_rational(v);
    }
    return CumulantSet<Rational>(q, order, mu);
}

py::dict edgeworth(std::size_t q, const std::map<std::vector<int>, std::string>& values, int levels) {
    const auto c = cumulants_from(q, values);
    if (levels < 1 || levels > c.order() - 2) throw std::invalid_argument("levels must be in 1..order-2");
    const auto P = build_P(c, levels);
    const auto Q = build_Q(c, levels);
    const auto map = invert_S_map(Q, c.covariance());
    std::vector<std::string> ps, qs, us;
    for (const auto& p : P) ps.push_back(p.to_string());
    for (const auto& x : Q) qs.push_back(x.to_string());
    for (const auto& u : map.potentials()) us.push_back(u.to_string());
    bool zero = true;
    for (const auto& r : pde_residuals(map, Q)) zero = zero && r.is_zero();
    py::dict out;
    out["P"] = ps;
    out["Q"] = qs;
    out["u"] = us;
    out["residuals_zero"] = zero;
    return out;
}

py::array_t<double> small_jumps(std::size_t q, double alpha, double tau, double eps, int depth, double t, std::size_t n,
                                std::uint64_t seed) {
    const StableLikeMeasure nu(q, alpha, tau);
    const AnnulusDecomposition dec(nu, eps, depth);
    py::array_t<double> out({n, q});
    RngStream rng(seed, derive_stream_id(0, 0, kPurposeSmallJumps));
    double* d = out.mutable_data();
    for (std::size_t i = 0; i < n; ++i) sample_small_jumps(nu, dec, t, rng, std::span<double>(d + i * q, q));
    return out;
}

py::dict run(const std::string& name, const std::string& config_text, std::optional<std::uint64_t> seed, int threads,
             const std::string& base_dir) {
    RunOptions opts;
    opts.seed = seed;
    opts.threads = threads;
    const Config cfg = resolved_config(Config::from_string(config_text, base_dir), opts);
    ExperimentResult r;
    {
        py::gil_scoped_release release;
        r = run_experiment(name, cfg, opts);
    }
    py::dict out;
    out["config_hash"] = hex64(cfg.hash());
    out["csv"] = r.table ? render_csv(*r.table, cfg.hash(), false) : std::string();
    out["text"] = r.text;
    out["metrics"] = r.metrics;
    out["notes"] = r.notes;
    return out;
}

}  // namespace

PYBIND11_MODULE(_levyclt, m) {
    m.doc() = "Edgeworth maps, small-jump sampling and Wasserstein estimators";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    m.def("wp_1d_exact", [](const Array& x, const Array& y, double p) { return wp_1d_exact(flat(x), flat(y), p); },
          py::arg("x"), py::arg("y"), py::arg("p") = 2.0);
    m.def(
        "wp_empirical",
        [](const Array& a, const Array& b, double p) {
            const auto r = wp_empirical(cloud(a), cloud(b), p);
            return py::make_tuple(r.distance, r.certified);
        },
        py::arg("a"), py::arg("b"), py::arg("p") = 2.0, "Exact W_p between equal-size clouds; returns (distance, certified).");
    m.def(
        "rate_fit",
        [](const std::vector<double>& xs, const std::vector<double>& ys) {
            const auto f = rate_fit(xs, ys);
            return py::make_tuple(f.slope, f.intercept);
        },
        py::arg("xs"), py::arg("ys"));
    m.def("edgeworth_build", &edgeworth, py::arg("q"), py::arg("cumulants"), py::arg("levels") = 1,
          "P_k, Q_k, u_k as exact rational text; cumulants map index tuples to 'p/q' strings.");
    m.def(
        "small_jump_covariance",
        [](std::size_t q, double alpha, double tau, double eps) {
            const auto s = small_jump_covariance(StableLikeMeasure(q, alpha, tau), eps).sigma;
            py::array_t<double> out({q, q});
            for (std::size_t i = 0; i < q; ++i)
                for (std::size_t j = 0; j < q; ++j) out.mutable_at(i, j) = s(i, j);
            return out;
        },
        py::arg("q"), py::arg("alpha"), py::arg("tau"), py::arg("eps"));
    m.def("sample_small_jumps", &small_jumps, py::arg("q"), py::arg("alpha"), py::arg("tau"), py::arg("eps"), py::arg("depth"),
          py::arg("t"), py::arg("n"), py::arg("seed"));
    m.def("cramer_amplify", &cramer_amplify, py::arg("rho"), py::arg("gamma"), py::arg("delta"));
    m.def("run_experiment", &run, py::arg("name"), py::arg("config"), py::arg("seed") = py::none(), py::arg("threads") = 1,
          py::arg("base_dir") = ".", "Runs a named experiment from INI text; returns csv/text/metrics.");
}
