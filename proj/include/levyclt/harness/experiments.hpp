#pragma once

// The five named experiments behind the CLI. Each takes a parsed config and returns its
// table (or text dump) plus headline metrics; nothing here touches the filesystem except
// reading the cumulant file named by edgeworth-build.

#include "levyclt/edgeworth/cumulants.hpp"
#include "levyclt/harness/config.hpp"
#include "levyclt/harness/csv.hpp"
#include "levyclt/levy/measure.hpp"
#include "levyclt/polycore/polynomial.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace levyclt {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides experiment.seed
    int threads = 1;                    // never changes results
};

struct ExperimentResult {
    std::string experiment;
    std::optional<CsvTable> table;
    std::string text;
    /// Secondary tables written next to the main output as <stem>.<key>.csv.
    std::map<std::string, CsvTable> extra;
    std::map<std::string, double> metrics;
    std::vector<std::string> notes;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"clt-rate", "jump-coupling", "sde-convergence", "edgeworth-build",
                                                "probe-cramer"};
    return names;
}

/// experiment.seed after the override; 1 when neither is given.
std::uint64_t effective_seed(const Config& cfg, const RunOptions& opts);
/// The config with experiment.seed pinned to the effective seed; its hash tags the outputs.
Config resolved_config(Config cfg, const RunOptions& opts);

/// [section] kind = stable-like (q, alpha, tau) | custom-radial (q, radii, density) | zero (q).
std::shared_ptr<const LevyMeasure> make_measure(const Config& cfg, const std::string& section = "measure");

ExperimentResult run_clt_rate(const Config& cfg, const RunOptions& opts);
ExperimentResult run_jump_coupling(const Config& cfg, const RunOptions& opts);
ExperimentResult run_sde_convergence(const Config& cfg, const RunOptions& opts);
ExperimentResult run_edgeworth_build(const Config& cfg, const RunOptions& opts);
ExperimentResult run_probe_cramer(const Config& cfg, const RunOptions& opts);
ExperimentResult run_experiment(const std::string& name, const Config& cfg, const RunOptions& opts);

/// Closed-form u_1 quoted for q = 2, Sigma = I, constant C = 0:
/// mu30 H3(x1)/18 + mu21 H2(x1)H1(x2)/6 + mu12 H1(x1)H2(x2)/6 + mu03 H3(x2)/18
/// + (mu30 + mu12) H1(x1)/3 + (mu03 + mu21) H1(x2)/3.
Polynomial<Rational> worked_example_u1(const CumulantSet<Rational>& c);

}  // namespace levyclt
