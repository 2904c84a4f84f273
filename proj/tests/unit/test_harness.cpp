#include "doctest.h"

#include "levyclt/harness/config.hpp"
#include "levyclt/harness/csv.hpp"
#include "levyclt/harness/experiments.hpp"
#include "levyclt/harness/laws.hpp"
#include "levyclt/perturbation/inverse_map.hpp"
#include "levyclt/edgeworth/expansion.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace levyclt;

namespace {

std::filesystem::path temp_dir() {
    auto p = std::filesystem::temp_directory_path() / "levyclt_harness_test";
    std::filesystem::create_directories(p);
    return p;
}

Config small_clt(const std::string& law, const std::string& mode) {
    return Config::from_string("[experiment]\nseed = 7\n[clt]\nlaw = " + law + "\nmode = " + mode +
                               "\nm = 4, 16, 64\nsamples = 400\nreplicates = 3\nbootstrap = 50\n");
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing, typed getters and errors") {
    const Config c = Config::from_string(
        "; comment\n[a]\nx = 1.5 ; trailing\nlist = 2^-3, 0.5, 1/4\nmat = 1 2 | 3 4\nflag = yes\nname = hello\n[b]\nn = 12\n");
    CHECK(c.get_double("a.x") == 1.5);
    CHECK(c.get_list("a.list") == std::vector<double>{0.125, 0.5, 0.25});
    const auto m = c.get_matrix("a.mat");
    CHECK(m.rows() == 2);
    CHECK(m(1, 0) == 3.0);
    CHECK(c.get_bool("a.flag", false));
    CHECK(c.get_int("b.n") == 12);
    CHECK(c.get_string("a.name") == "hello");
    CHECK(c.get_double("a.missing", 9.0) == 9.0);
    CHECK_THROWS_AS(c.get_string("a.missing"), ConfigError);
    CHECK_THROWS_AS(c.get_double("a.name"), ConfigError);
    CHECK_THROWS_AS(c.get_int("a.x"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("[a\nx=1\n"), ConfigError);
    CHECK_THROWS_AS(Config::from_file("/nonexistent/levyclt.ini"), ConfigError);
    CHECK_THROWS_AS(Config::from_string("[a]\nm = 1 2 | 3\n").get_matrix("a.m"), ConfigError);
}

TEST_CASE("canonical form and FNV-1a hash") {
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
    const Config a = Config::from_string("[s]\nb = 2\na = 1\n");
    const Config b = Config::from_string("[s]\na = 1\nb = 2\n");
    CHECK(a.canonical() == "s.a=1\ns.b=2\n");
    CHECK(a.hash() == b.hash());
    RunOptions o;
    o.seed = 99;
    CHECK(resolved_config(a, o).hash() != resolved_config(a, {}).hash());
    CHECK(resolved_config(a, o).get_string("experiment.seed") == "99");
}

TEST_CASE("RFC-4180 quoting and round trip") {
    CHECK(csv_quote("plain") == "plain");
    CHECK(csv_quote("a,b") == "\"a,b\"");
    CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CsvTable t({"x", "note"});
    t.add_row({"1", "comma, inside"});
    t.add_row({"2", "line\nbreak and \"quotes\""});
    CHECK_THROWS(t.add_row({"3"}));
    const std::string text = render_csv(t, 0xabcULL, true);
    CHECK(text.rfind("# generated_at=", 0) == 0);
    const CsvTable back = parse_csv(text);
    CHECK(back.header() == std::vector<std::string>{"config_hash", "x", "note"});
    REQUIRE(back.rows().size() == 2);
    CHECK(back.rows()[1][2] == "line\nbreak and \"quotes\"");
    CHECK(back.rows()[0][0] == hex64(0xabcULL));
    CHECK(render_csv(t, 1, false).rfind("config_hash,", 0) == 0);
    CHECK(fmt(0.1) == "0.1");
    CHECK(fmt(std::nan("")) == "nan");
}

TEST_CASE("output guard refuses mismatched hashes unless forced") {
    const auto dir = temp_dir();
    const auto csv = dir / "guard.csv";
    const auto txt = dir / "guard.txt";
    std::filesystem::remove(csv);
    std::filesystem::remove(txt);
    CsvTable t({"v"});
    t.add_row({"1"});
    write_output(csv, render_csv(t, 1, true), 1, {});
    CHECK(existing_output_hash(csv) == hex64(1));
    write_output(csv, render_csv(t, 1, false), 1, {});
    CHECK_THROWS_AS(write_output(csv, render_csv(t, 2, false), 2, {}), ConfigError);
    write_output(csv, render_csv(t, 2, false), 2, {true, true});
    CHECK(existing_output_hash(csv) == hex64(2));
    write_output(txt, render_text("body\n", 5, true), 5, {});
    CHECK(existing_output_hash(txt) == hex64(5));
    CHECK_THROWS_AS(write_output(txt, render_text("body\n", 6, false), 6, {}), ConfigError);
}

TEST_CASE("built-in laws: exact cumulants and lattice rejection") {
    const auto e = make_law("exponential")->cumulants(5);
    CHECK(e.mu(MultiIndex{2}) == 1);
    CHECK(e.mu(MultiIndex{3}) == 2);
    CHECK(e.mu(MultiIndex{4}) == 6);
    CHECK(e.mu(MultiIndex{5}) == 24);
    const auto d = make_law("disk")->cumulants(4);
    CHECK(d.mu(MultiIndex{2, 0}) == Rational(1, 4));
    CHECK(d.mu(MultiIndex{1, 1}) == 0);
    CHECK(d.mu(MultiIndex{4, 0}) == Rational(-1, 16));
    CHECK(d.mu(MultiIndex{2, 2}) == Rational(-1, 48));
    CHECK(d.mu(MultiIndex{3, 0}) == 0);
    const auto pe = make_law("product-exponential")->cumulants(3);
    CHECK(pe.mu(MultiIndex{0, 3}) == 2);
    CHECK(pe.mu(MultiIndex{2, 1}) == 0);
    CHECK(make_law("gaussian", 2)->cumulants(4).is_gaussian());
    try {
        make_law("rademacher");
        FAIL("lattice law accepted");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("Cramer") != std::string::npos);
    }
    CHECK_THROWS_AS(make_law("cauchy"), ConfigError);
}

TEST_CASE("law samplers match their cumulants") {
    for (const std::string name : {"exponential", "disk"}) {
        const auto law = make_law(name);
        const auto c = law->cumulants(3);
        const std::size_t q = law->dim();
        RngStream rng(3, 1);
        const int n = 100000;
        std::vector<double> s(q), mean(q, 0.0), m2(q, 0.0);
        for (int i = 0; i < n; ++i) {
            law->sample_sum(8, rng, s);
            for (std::size_t j = 0; j < q; ++j) {
                mean[j] += s[j] / n;
                m2[j] += s[j] * s[j] / n;
            }
        }
        for (std::size_t j = 0; j < q; ++j) {
            const double var = c.covariance()(j, j).get_d();
            CHECK(std::abs(mean[j]) < 5.0 * std::sqrt(var / n));
            CHECK(m2[j] == doctest::Approx(var).epsilon(0.03));
        }
    }
    const auto qf = *make_law("exponential")->sum_quantile(1);
    CHECK(qf(1.0 - std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("push-forward CDF and quantile") {
    CumulantSet<Rational> c(1, 3, IndexMap<Rational>{{MultiIndex{2}, Rational(1)}, {MultiIndex{3}, Rational(2)}});
    const auto map = invert_S_map(build_Q(c, 1), c.covariance()).cast<double>();
    boost::math::normal_distribution<> nd;
    // r = 0 is the identity map
    for (double y : {-2.0, -0.3, 0.0, 1.7})
        CHECK(pushforward_cdf_1d(map, 0.25, y, 0) == doctest::Approx(boost::math::cdf(nd, y)).epsilon(1e-12));
    // derivative of the CDF is the density, including the folded left tail of a quadratic map
    const double eps = 0.25;
    for (double y : {-3.0, -2.5, -1.0, 0.0, 0.8, 2.5}) {
        const double h = 1e-5;
        const double dcdf = (pushforward_cdf_1d(map, eps, y + h) - pushforward_cdf_1d(map, eps, y - h)) / (2 * h);
        CHECK(dcdf == doctest::Approx(pushforward_density_1d(map, eps, y)).epsilon(1e-5));
    }
    for (double t : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999})
        CHECK(pushforward_cdf_1d(map, eps, pushforward_quantile_1d(map, eps, t)) == doctest::Approx(t).epsilon(1e-9));
    CHECK_THROWS(pushforward_quantile_1d(map, eps, 1.0));
}

TEST_CASE("clt-rate is reproducible and independent of threads") {
    const Config cfg = small_clt("exponential", "gaussian");
    RunOptions one, three;
    three.threads = 3;
    const auto a = run_clt_rate(cfg, one);
    const auto b = run_clt_rate(cfg, three);
    CHECK(render_csv(*a.table, cfg.hash(), false) == render_csv(*b.table, cfg.hash(), false));
    CHECK(a.table->rows().size() == 9 + 1 + 3 + 1);
    RunOptions other;
    other.seed = 8;
    CHECK(run_clt_rate(cfg, other).metrics.at("mean_distance_4") != a.metrics.at("mean_distance_4"));
    CHECK(a.metrics.at("quantile_slope") == doctest::Approx(-0.5).epsilon(0.1));
}

TEST_CASE("clt-rate modes, null case and validation") {
    const auto null = run_clt_rate(small_clt("gaussian", "gaussian"), {});
    CHECK(null.metrics.at("null_case") == 1.0);
    const auto& rows = null.table->rows();
    CHECK(rows.back()[null.table->column("note")].find("degenerate") != std::string::npos);
    const auto pert = run_clt_rate(small_clt("exponential", "perturbed"), {});
    CHECK(pert.metrics.at("quantile_slope") == doctest::Approx(-1.0).epsilon(0.15));
    const auto disk = run_clt_rate(small_clt("disk", "gaussian"), {});
    CHECK(std::isfinite(disk.metrics.at("mean_distance_16")));

    Config bad = small_clt("exponential", "gaussian");
    bad.set("clt.p", "3");
    CHECK_THROWS_AS(run_clt_rate(bad, {}), ConfigError);
    bad = small_clt("disk", "gaussian");
    bad.set("clt.samples", "5000");
    CHECK_THROWS_AS(run_clt_rate(bad, {}), ConfigError);
    bad = small_clt("exponential", "perturbed");
    bad.set("clt.order", "3");
    CHECK_THROWS_AS(run_clt_rate(bad, {}), ConfigError);
    bad = small_clt("exponential", "sideways");
    CHECK_THROWS_AS(run_clt_rate(bad, {}), ConfigError);
    CHECK_THROWS_AS(run_clt_rate(small_clt("bernoulli", "gaussian"), {}), ConfigError);
}

TEST_CASE("jump-coupling: zero measure, t beyond eps, validation") {
    const std::string base = "[experiment]\nseed = 3\n[jump]\neps = 2^-2, 2^-3, 2^-4\nsamples = 200\nreplicates = 2\nbootstrap = 20\n";
    const auto zero = run_jump_coupling(Config::from_string(base + "[measure]\nkind = zero\nq = 2\n"), {});
    CHECK(zero.metrics.at("max_distance") == 0.0);
    CHECK(std::isnan(zero.metrics.at("slope")));
    const auto t1 = run_jump_coupling(
        Config::from_string(base + "time = 1\ndepth = 1\n[measure]\nkind = stable-like\nq = 2\nalpha = 1.5\n"), {});
    CHECK(std::isfinite(t1.metrics.at("max_distance")));
    CHECK(t1.metrics.at("max_distance") < 1.0);
    CHECK_THROWS_AS(run_jump_coupling(Config::from_string(base + "[measure]\nkind = stable-like\nq = 2\nalpha = 0.5\n"), {}),
                    ConfigError);
    CHECK_THROWS_AS(run_jump_coupling(Config::from_string(base + "[measure]\nkind = mystery\n"), {}), ConfigError);
}

TEST_CASE("sde-convergence: degenerate cases and path dump") {
    const std::string base =
        "[experiment]\nseed = 4\n[measure]\nkind = zero\nq = 2\n[sde]\nh = 2^-2, 2^-3, 2^-4\nbatch = 8\nfine_substeps = 4\n"
        "x0 = 0.5, 0.5\na = 0.3, -0.2\npath_dump = 2\n";
    const auto zero = run_sde_convergence(Config::from_string(base + "sigma = zero\n"), {});
    CHECK(zero.metrics.at("max_rms") == 0.0);
    CHECK(std::isnan(zero.metrics.at("slope")));
    const auto& paths = zero.extra.at("paths");
    CHECK(paths.header().size() == 3 + 2 + 2);
    CHECK(paths.rows().size() == 2 * 5);
    CHECK(paths.rows().back()[paths.column("X_1")] == "0.5");
    const auto additive = run_sde_convergence(Config::from_string(base + "sigma = identity\n"), {});
    CHECK(additive.metrics.at("max_rms") < 1e-12);
    CHECK_THROWS_AS(run_sde_convergence(Config::from_string(base + "sigma = identity\nmode = exact\n"), {}), ConfigError);
    CHECK_THROWS_AS(run_sde_convergence(Config::from_string(base + "sigma = wobbly\n"), {}), ConfigError);
}

TEST_CASE("edgeworth-build dumps and errors") {
    const auto dir = temp_dir();
    {
        std::ofstream f(dir / "gauss.cum");
        f << "2 0 1\n0 2 2\n";
        std::ofstream g(dir / "bad.cum");
        g << "2 0 1\n0 2 x\n";
    }
    const auto gauss = run_edgeworth_build(
        Config::from_string("[edgeworth]\ncumulants = gauss.cum\norder = 5\nlevels = 3\n", dir), {});
    CHECK(gauss.metrics.at("all_zero") == 1.0);
    CHECK(gauss.text.find("u_3 = 0") != std::string::npos);
    CHECK_THROWS_AS(run_edgeworth_build(Config::from_string("[edgeworth]\ncumulants = bad.cum\n", dir), {}), ConfigError);
    CHECK_THROWS_AS(run_edgeworth_build(Config::from_string("[edgeworth]\ncumulants = none.cum\n", dir), {}), ConfigError);
    CHECK_THROWS_AS(run_edgeworth_build(Config::from_string("[edgeworth]\ncumulants = gauss.cum\nlevels = 4\norder = 5\n", dir), {}),
                    ConfigError);

    const auto worked = run_edgeworth_build(Config::from_file(std::string(LEVYCLT_SOURCE_DIR) + "/configs/edgeworth_worked.ini"), {});
    CHECK(worked.metrics.at("residuals_zero") == 1.0);
    CHECK(worked.metrics.at("moment_mismatches") == 0.0);
    CHECK(worked.metrics.at("reference_cubic_match") == 1.0);
}

TEST_CASE("worked-example closed form") {
    CumulantSet<Rational> c(2, 3, IndexMap<Rational>{{MultiIndex{2, 0}, Rational(1)}, {MultiIndex{0, 2}, Rational(1)},
                                                     {MultiIndex{3, 0}, Rational(6)}});
    // mu30 H3(x1)/18 + mu30 H1(x1)/3 = (x1^3 - 3 x1)/3 + 2 x1
    const auto u = worked_example_u1(c);
    CHECK(u.coefficient(MultiIndex{3, 0}) == Rational(1, 3));
    CHECK(u.coefficient(MultiIndex{1, 0}) == Rational(1));
    CHECK(u.coefficient(MultiIndex{0, 1}) == 0);
}

TEST_CASE("probe-cramer rows and validation") {
    const std::string base = "[measure]\nkind = stable-like\nq = 2\nalpha = 1.5\n[probe]\nrho = 8\nt_max = 20\ngrid_points = 15\n";
    const auto r = run_probe_cramer(Config::from_string(base + "r = 3, 4\n"), {});
    CHECK(r.metrics.at("sup_all") < 0.9);
    CHECK(r.metrics.at("sup_r3") == doctest::Approx(r.metrics.at("sup_r4")).epsilon(1e-6));
    CHECK(r.table->rows().size() == 3);
    CHECK_THROWS_AS(run_probe_cramer(Config::from_string(base + "r = 3.5\n"), {}), ConfigError);
    CHECK_THROWS_AS(run_probe_cramer(Config::from_string(base + "r = 3\nrho = 30\n"), {}), ConfigError);
}

}
