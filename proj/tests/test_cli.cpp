#include "support.hpp"

#include <functional>
#include <numbers>
#include <sstream>

#include "bergman/cli.hpp"

using namespace test;

namespace {

const std::filesystem::path kConfigs = BERGMAN_CONFIG_DIR;

// Small enough to run in a second or two.
Json small_config(std::vector<std::string> suites) {
  Json j = Json::parse(read_text(kConfigs / "gaussian.json"));
  j["h_grid"] = {0.2, 0.1};
  j["domains"] = {{"U", 0.4}, {"V", 1.0}, {"radial_nodes", 32}, {"angular_nodes", 64},
                  {"u_radial_nodes", 6}, {"u_angular_nodes", 12}};
  j["kernel"] = {{"orders", {3, 4}}, {"pairs", 10}, {"pair_radius", 0.2}};
  j["oracle"] = {{"gram_degree", 15}, {"samples", 500}, {"seed", 4}};
  j["suites"] = std::move(suites);
  return j;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("bergman-test-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string error_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("canonical configs parse") {
  for (const char* name : {"gaussian.json", "quadratic-lambda.json", "perturbed-quartic.json"}) {
    CAPTURE(name);
    const RunConfig c = load_config(kConfigs / name);
    CHECK(c.maxdeg >= 2 * c.order + 4);
    CHECK(c.u_radius < c.v_radius);
    CHECK(c.suites.size() == 4);
  }
  const RunConfig g = load_config(kConfigs / "gaussian.json");
  CHECK(g.order == 6);
  CHECK(g.pairs == 100);
  CHECK(std::abs(g.phi.coeff(MultiIndex{1, 1}) - 0.5) < 1e-15);
}

TEST_CASE("config validation") {
  Json j = small_config({"amplitude"});
  j["weight"]["maxdeg"] = 8;
  j["amplitude"]["order"] = 4;
  const std::string msg = error_message([&] { parse_config(j); });
  CHECK(msg.find("degree budget") != std::string::npos);
  CHECK(msg.find("2N + 4 = 12") != std::string::npos);

  Json r = small_config({"amplitude"});
  r["domains"]["U"] = 1.2;
  CHECK(error_message([&] { parse_config(r); }).find("0 < U < V") != std::string::npos);

  Json s = small_config({"amplitude", "plot"});
  expect_error([&] { parse_config(s); }, ErrorKind::ConfigInvalid);
  Json h = small_config({"amplitude"});
  h["h_grid"] = {0.1, 0.1};
  expect_error([&] { parse_config(h); }, ErrorKind::ConfigInvalid);
  Json k = small_config({"kernel"});
  k["kernel"]["orders"] = {4, 3};
  expect_error([&] { parse_config(k); }, ErrorKind::ConfigInvalid);
  Json f = small_config({"kernel"});
  f["output"]["format"] = "xml";
  expect_error([&] { parse_config(f); }, ErrorKind::ConfigInvalid);
  expect_error([] { parse_config(Json::array()); }, ErrorKind::ConfigInvalid);
  expect_error([] { load_config(kConfigs / "missing.json"); }, ErrorKind::IoError);
}

TEST_CASE("suite selection") {
  const Json report = run(parse_config(small_config({"amplitude"})));
  CHECK(report.at("schema") == kReportSchema);
  CHECK(report.at("suites").size() == 1);
  const Json& a = report.at("suites").at("amplitude");
  CHECK(a.at("status") == "pass");
  CHECK(std::abs(a.at("a0_at_base").at(0).get<double>() - 1.0 / std::numbers::pi) < 1e-12);
}

TEST_CASE("reports are deterministic and reproducible from the echo") {
  const RunConfig c = parse_config(small_config({"validate", "amplitude", "kernel"}));
  const Json r1 = run(c);
  const Json r2 = run(c);
  CHECK(report_json_text(r1) == report_json_text(r2));
  for (const char* s : {"validate", "amplitude", "kernel"}) {
    CAPTURE(s);
    CHECK(r1.at("suites").at(s).at("status") == "pass");
  }
  const Json r3 = run(parse_config(r1.at("config")));
  CHECK(report_json_text(r1) == report_json_text(r3));
}

TEST_CASE("emitted files") {
  const Json report = run(parse_config(small_config({"kernel"})));
  const auto dir = scratch("emit");
  const auto json_paths = emit(report, "json", dir);
  CHECK(json_paths.size() == 1);
  CHECK(Json::parse(read_text(json_paths[0])) == report);

  const auto csv_paths = emit(report, "csv", dir);
  std::istringstream in(read_text(csv_paths[0]));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 2 * 2);  // header + (h, N) rows
  CHECK(lines[0] == "h,N,err_U,beta_running");
  CHECK(lines[1].rfind("0.2,3,", 0) == 0);
  CHECK(lines[4].rfind("0.1,4,", 0) == 0);
  std::filesystem::remove_all(dir);

  expect_error([&] { emit(report, "json", "/proc/bergman-nonexistent/out"); }, ErrorKind::IoError);
}
