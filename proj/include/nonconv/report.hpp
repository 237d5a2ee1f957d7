#pragma once

#include <string>
#include <vector>

#include "nonconv/bounds.hpp"
#include "nonconv/experiments.hpp"

namespace nonconv {

// Emission helpers.  All output is byte-deterministic: fixed column
// order, fixed float formatting, no timestamps.

std::string format_double(double v); // shortest round-trip decimal

// one row per trial; header:
// trial,seed,method,first_dead_layer,dead_verdicts,frozen_prefix_ok,
// downstream_moved,risk_init,risk_final,final_gap,nonconvergent
std::string trials_csv(const std::vector<TrialRecord>& records);

// depth,analytic_bound,witness_freq,certified_freq,nonconv_freq,trained,ci3,n_trials
std::string sweep_csv(const std::vector<DepthSweepRow>& rows);

std::string bound_report_json(const BoundReport& rep, const Architecture& arch,
                              const std::string& activation,
                              const std::string& distribution,
                              const BoundInputs& in);

std::string frequency_json(const FrequencyResult& res, const std::string& label);

std::string sweep_json(const std::vector<DepthSweepRow>& rows,
                       const DepthSweepBoundResult* analytic);

std::string mc_init_csv(const std::vector<std::string>& layer_labels,
                        const std::vector<double>& freqs,
                        const std::vector<double>& bounds);

// polyline plot of the risk traces of a few records
std::string risk_traces_svg(const std::vector<TrialRecord>& records,
                            std::size_t max_traces = 16);

// measured frequency vs depth with the analytic bound overlay
std::string sweep_svg(const std::vector<DepthSweepRow>& rows);

void write_file(const std::string& path, const std::string& content);

} // namespace nonconv
