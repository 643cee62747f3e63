// Command-line driver: one subcommand per suite, `report` for the full run.
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "bergman/cli.hpp"

namespace {

std::vector<double> parse_h_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw bergman::Error(bergman::ErrorKind::ConfigInvalid, "bad --h-grid entry \"" + item + "\"");
    }
    out.push_back(v);
  }
  return out;
}

struct Options {
  std::string config;
  std::string h_grid;
  int order = -1;
  std::string out;
  std::string format;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  sub->add_option("--h-grid", o.h_grid, "comma-separated h values, overrides the config");
  sub->add_option("--order", o.order, "amplitude order N, overrides the config")->check(CLI::NonNegativeNumber);
  sub->add_option("--out", o.out, "output directory, overrides the config");
  sub->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asymptotic Bergman kernels: amplitude construction and numerical verification"};
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"validate", "weight, polarization, phase and contour margins"},
      {"amplitude", "amplitude coefficients, growth and the defining equation"},
      {"kernel", "assembled kernel against the Gram oracle"},
      {"verify", "Fourier inversion, inequalities, stationary phase quadrature"},
      {"report", "every suite selected in the config"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    bergman::RunConfig c = bergman::load_config(o.config);
    if (!o.h_grid.empty()) c.h_grid = parse_h_grid(o.h_grid);
    if (o.order >= 0) {
      c.order = o.order;
      c.hmax = o.order;
      c.kernel_orders.erase(std::remove_if(c.kernel_orders.begin(), c.kernel_orders.end(),
                                           [&](int n) { return n > o.order; }),
                            c.kernel_orders.end());
    }
    if (!o.out.empty()) c.out_dir = o.out;
    if (!o.format.empty()) c.format = o.format;
    if (cmd != "report") c.suites = {cmd};
    bergman::check_config(c);
    // Fail before the expensive part if the results cannot be written.
    bergman::ensure_directory(c.out_dir);

    const bergman::Json report = bergman::run(c);
    for (const auto& p : bergman::emit(report, c.format, c.out_dir)) std::cout << "wrote " << p.string() << "\n";
    bool ok = true;
    for (const auto& [name, s] : report.at("suites").items()) {
      const std::string status = s.at("status").get<std::string>();
      std::cout << name << ": " << status;
      if (s.contains("error")) std::cout << " (" << s.at("error").get<std::string>() << ")";
      std::cout << "\n";
      ok = ok && status == "pass";
    }
    return ok ? 0 : 1;
  } catch (const bergman::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
