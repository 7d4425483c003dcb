#include "drfed/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace drfed {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj, int run_id) {
  std::string out = "run_id,t,cum_regret,cum_comm_edges,a1_dev_sup,connected,min_n,max_gap_nN\n";
  const std::size_t len = traj.regret_series.size();
  for (std::size_t i = 0; i < len; ++i) {
    out += std::to_string(run_id);
    out.push_back(',');
    out += std::to_string(static_cast<std::int64_t>(i) + 1);
    out.push_back(',');
    out += fmt17(traj.regret_series[i]);
    out.push_back(',');
    out += std::to_string(traj.comm_series[i]);
    out.push_back(',');
    out += fmt17(traj.a1_dev_series[i]);
    out.push_back(',');
    out += traj.connected_series[i] ? "1" : "0";
    out.push_back(',');
    out += std::to_string(traj.min_n_series[i]);
    out.push_back(',');
    out += std::to_string(traj.max_gap_series[i]);
    out.push_back('\n');
  }
  return out;
}

std::string aggregate_csv_rows(const AggregateSeries& agg, const std::string& param_label) {
  std::string out;
  for (std::size_t i = 0; i < agg.t.size(); ++i) {
    out += param_label;
    out.push_back(',');
    out += std::to_string(agg.t[i]);
    out.push_back(',');
    out += fmt17(agg.mean[i]);
    out.push_back(',');
    out += fmt17(agg.mean[i] - agg.half_width[i]);
    out.push_back(',');
    out += fmt17(agg.mean[i] + agg.half_width[i]);
    out.push_back('\n');
  }
  return out;
}

std::string aggregate_csv(const AggregateSeries& agg, const std::string& param_label) {
  return "param,t,mean,ci_lo,ci_hi\n" + aggregate_csv_rows(agg, param_label);
}

std::string manifest_json(const RunSettings& settings, const std::string& version,
                          const std::vector<std::uint64_t>& seeds,
                          const std::vector<std::string>& output_paths,
                          double wall_clock_seconds) {
  nlohmann::ordered_json j;
  j["version"] = version;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [key, value] : canonical_config(settings)) cfg[key] = value;
  j["config"] = std::move(cfg);
  j["config_hash"] = config_hash(settings);
  j["seeds"] = seeds;
  j["outputs"] = output_paths;
  j["wall_clock_seconds"] = wall_clock_seconds;
  return j.dump(2) + "\n";
}

std::string gnuplot_script(const std::string& aggregate_csv_name) {
  std::string out;
  out += "# Render with: gnuplot -persist plot.gp\n";
  out += "set datafile separator \",\"\n";
  out += "set key left top\n";
  out += "set xlabel \"t\"\n";
  out += "set ylabel \"mean cumulative regret\"\n";
  out += "set logscale x\n";
  out += "plot \"" + aggregate_csv_name +
         "\" skip 1 using 2:3:4:5 with yerrorbars pointtype 0 title \"95% CI\", \\\n";
  out += "     \"" + aggregate_csv_name + "\" skip 1 using 2:3 with lines title \"mean\"\n";
  return out;
}

std::string sweep_csv(const std::string& param, const SweepSummary& summary) {
  std::string out = "param,value,final_mean,final_half_width\n";
  for (const SweepPoint& p : summary.points) {
    out += param;
    out.push_back(',');
    out += fmt17(p.param_value);
    out.push_back(',');
    out += fmt17(p.final_mean);
    out.push_back(',');
    out += fmt17(p.final_half_width);
    out.push_back('\n');
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec)
      throw std::runtime_error("write_text_file: cannot create directory " +
                               p.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write_text_file: short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace drfed
