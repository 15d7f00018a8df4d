// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mdmsim/config.hpp"
#include "mdmsim/metrics.hpp"

namespace mdmsim {

struct PointResult {
    double power_dbm = 0.0;
    int k_rx = 0;
    int capture = 0; // -1 marks a capture average
    bool ok = false;
    std::string error;
    MetricsReport report;
};

struct ResultSet {
    ExperimentSpec spec;
    std::vector<PointResult> captures;
    std::vector<PointResult> averaged;
    std::vector<std::string> failures;
    std::string output_dir;

    int failure_count() const { return static_cast<int>(failures.size()); }
};

/// Runs the full chain for every (launch power x receiver subset x capture)
/// point: transmit, propagate, add noise, KK-detect, equalize, measure.
/// Per-point failures are recorded and the sweep continues. Writes
/// results.csv, the resolved config, and per-point reports under
/// spec.output_dir. Deterministic for a fixed spec, independent of jobs.
ResultSet run_experiment(const ExperimentSpec& spec);

/// Re-emits tidy plot data from a results directory. Figures: gmi_vs_power,
/// mdl_vs_power, xt_matrix. Returns the files written (into out_dir, default
/// the results directory). Byte-identical on repeated export.
std::vector<std::string> export_plotdata(const std::string& results_dir, const std::string& figure,
                                         const std::string& out_dir = "");

/// Full single-point receiver chain, exposed for tests: KK front end on every
/// tributary of `noisy` followed by subset selection, offset recovery, matched
/// filtering and equalization against the reference.
MetricsReport run_receiver_chain(const ComplexFrame& noisy, const TxReference& ref,
                                 const ExperimentSpec& spec, int k_rx);

std::string report_to_json(const MetricsReport& report);

} // namespace mdmsim
