#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bergman/io.hpp"
#include "bergman/projector.hpp"

namespace bergman {

inline constexpr const char* kReportSchema = "bergman-report/1";

// Everything a run needs. The JSON form (see config_to_json) is echoed into
// the report with all defaults filled in, so the echo alone reproduces a run.
struct RunConfig {
  std::string name = "run";

  // weight
  int n = 1;
  Point base;
  double trust_radius = 1.0;
  int maxdeg = 0;
  TruncatedSeries phi;  // in (x - x0, conj(x - x0))

  // truncation
  int order = 4;
  int hmax = 4;

  std::vector<double> h_grid{0.2, 0.15, 0.1, 0.07, 0.05};

  // domains
  DomainShape shape = DomainShape::Disc;
  double u_radius = 0.5;
  double v_radius = 1.0;
  int radial_nodes = 64;
  int angular_nodes = 128;
  int u_radial_nodes = 16;
  int u_angular_nodes = 32;

  // kernel suite
  std::vector<int> kernel_orders;  // empty: {order}
  int pairs = 20;
  double pair_radius = 0.0;  // 0: U radius
  double pair_offset = 0.05;
  std::vector<TruncatedSeries> test_functions;  // n variables; empty: 1, x, x^2, x^3

  // oracle settings
  int gram_degree = 30;
  std::optional<double> delta;  // default 0.5 * measured gap constant
  double growth_radius = 0.0;   // 0: 0.3 * trust radius
  double margin_radius = 0.0;   // 0: 0.3 * trust radius
  int samples = 10000;
  std::uint64_t seed = 1;

  std::vector<std::string> suites{"validate", "amplitude", "kernel", "verify"};
  std::filesystem::path out_dir = "out";
  std::string format = "json";

  double effective_growth_radius() const { return growth_radius > 0.0 ? growth_radius : 0.3 * trust_radius; }
  double effective_margin_radius() const { return margin_radius > 0.0 ? margin_radius : 0.3 * trust_radius; }
  double effective_pair_radius() const { return pair_radius > 0.0 ? pair_radius : u_radius; }
  std::vector<int> effective_kernel_orders() const;
  std::vector<TruncatedSeries> effective_test_functions() const;
  bool selected(const std::string& suite) const;
};

// Parses and checks a config; ConfigInvalid on schema or invariant violations.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::filesystem::path& path);
Json config_to_json(const RunConfig& c);
// Degree budget maxdeg >= 2N + 4, U < V < trust radius, suite names, grid sanity.
void check_config(const RunConfig& c);

// Runs the selected suites in dependency order. Failures inside a suite are
// recorded in its section; ConfigInvalid from check_config propagates.
Json run(const RunConfig& c);

// Writes report.json or kernel.csv into `dir`; returns the paths written.
std::vector<std::filesystem::path> emit(const Json& report, const std::string& format,
                                        const std::filesystem::path& dir);
std::string report_json_text(const Json& report);
std::string report_csv_text(const Json& report);

}  // namespace bergman
