#pragma once

// Deterministic artifact emission: per-run trajectory CSVs, tidy aggregate
// CSVs, run manifests, and an optional gnuplot script. All float formatting
// is 17-significant-digit so written artifacts are exact and byte-stable.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "drfed/analysis.hpp"
#include "drfed/config.hpp"
#include "drfed/simulator.hpp"

namespace drfed {

/// CSV with header run_id,t,cum_regret,cum_comm_edges,a1_dev_sup,connected,
/// min_n,max_gap_nN — one row per round.
std::string trajectory_csv(const Trajectory& traj, int run_id);

/// Tidy CSV param,t,mean,ci_lo,ci_hi; param_label is echoed per row (the
/// sweep point, or "-" for plain runs).
std::string aggregate_csv(const AggregateSeries& agg, const std::string& param_label);

/// Appends rows to an existing tidy CSV body (same schema, no header).
std::string aggregate_csv_rows(const AggregateSeries& agg, const std::string& param_label);

/// Run manifest: resolved config (canonical strings), version, seed list,
/// output paths, wall clock. Everything except wall_clock_seconds is
/// byte-stable across reruns of the same config.
std::string manifest_json(const RunSettings& settings, const std::string& version,
                          const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::string>& output_paths,
                          double wall_clock_seconds);

/// Gnuplot script rendering an aggregate.csv next to it.
std::string gnuplot_script(const std::string& aggregate_csv_name);

/// Sweep table CSV: param,value,final_mean,final_half_width.
std::string sweep_csv(const std::string& param, const SweepSummary& summary);

/// Writes content to path, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_text_file(const std::string& path, const std::string& content);

/// Reads a whole file; throws std::runtime_error if unreadable.
std::string read_text_file(const std::string& path);

}  // namespace drfed
