// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdmsim/channel.hpp"
#include "mdmsim/equalizer.hpp"
#include "mdmsim/kk_receiver.hpp"
#include "mdmsim/metrics.hpp"
#include "mdmsim/transmitter.hpp"

namespace mdmsim {

/// Full description of one experiment: configuration of every stage plus the
/// sweep axes and seeding. Defaults reproduce the 6-mode reference scenario.
struct ExperimentSpec {
    TxConfig tx;
    LinkConfig link;
    KkConfig kk;
    EqualizerConfig eq;
    FecModel fec;
    std::vector<double> sweep_dbm{-6, -4, -2, 0, 2, 4, 6, 8, 10, 12, 14};
    std::vector<int> rx_subsets{6};
    int n_captures = 5;
    std::uint64_t base_seed = 1;
    double freq_offset_hz = 25e6; // residual carrier offset impairment
    int guard_symbols = 2048;     // trimmed per frame edge before equalization
    std::string output_dir = "out";
    int jobs = 1;
    bool dump_matrices = false;
    std::string preset_name = "paper6";

    ExperimentSpec();
};

struct ValidationIssue {
    std::string path;
    std::string message;
};

std::string to_string(const ValidationIssue& issue);

/// Parses JSON text over the paper6 defaults. Collects every violation
/// (syntax, type, range, cross-field) instead of stopping at the first.
/// On syntax errors the issue message carries line/column.
ExperimentSpec parse_spec(const std::string& json_text, std::vector<ValidationIssue>& issues);

/// Semantic validation only (already-built spec).
std::vector<ValidationIssue> validate_spec(const ExperimentSpec& spec);

/// Resolved spec as canonical JSON.
std::string spec_to_json(const ExperimentSpec& spec);

std::vector<std::string> preset_names();
ExperimentSpec preset_spec(const std::string& name);

} // namespace mdmsim
