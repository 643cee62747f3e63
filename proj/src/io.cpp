#include "bergman/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace bergman {

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json complex_to_json(Complex z) { return Json::array({number(z.real()), number(z.imag())}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::ConfigInvalid, "complex value must be a number or [re, im]: " + j.dump());
}

Json point_to_json(const Point& p) {
  Json out = Json::array();
  for (const auto& z : p) out.push_back(complex_to_json(z));
  return out;
}

Point point_from_json(const Json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw Error(ErrorKind::ConfigInvalid, "point must have " + std::to_string(n) + " complex entries: " + j.dump());
  }
  Point p;
  for (const auto& e : j) p.push_back(complex_from_json(e));
  return p;
}

Json series_to_json(const TruncatedSeries& s) {
  Json terms = Json::array();
  for (const auto& [idx, c] : s.terms()) {
    terms.push_back(Json::array({idx.to_vector(), number(c.real()), number(c.imag())}));
  }
  return {{"nvars", s.nvars()}, {"maxdeg", s.maxdeg()}, {"terms", terms}};
}

TruncatedSeries series_from_json(const Json& j, int nvars, int maxdeg) {
  const Json* terms = &j;
  if (j.is_object()) {
    nvars = j.at("nvars").get<int>();
    maxdeg = j.at("maxdeg").get<int>();
    terms = &j.at("terms");
  }
  if (nvars <= 0 || nvars > kMaxVars) throw Error(ErrorKind::ConfigInvalid, "series needs 1.." + std::to_string(kMaxVars) + " variables");
  if (!terms->is_array()) throw Error(ErrorKind::ConfigInvalid, "series terms must be a list");
  TruncatedSeries s(nvars, maxdeg);
  for (const auto& t : *terms) {
    if (!t.is_array() || t.size() != 3 || !t[0].is_array()) {
      throw Error(ErrorKind::ConfigInvalid, "series term must be [exponents, re, im]: " + t.dump());
    }
    const auto exps = t[0].get<std::vector<int>>();
    if (static_cast<int>(exps.size()) != nvars) {
      throw Error(ErrorKind::ConfigInvalid, "exponent list " + t[0].dump() + " does not match " + std::to_string(nvars) + " variables");
    }
    for (int e : exps) {
      if (e < 0 || e > 255) throw Error(ErrorKind::ConfigInvalid, "exponent out of range: " + t[0].dump());
    }
    const MultiIndex idx{std::span<const int>(exps)};
    if (idx.degree() > maxdeg) {
      throw Error(ErrorKind::ConfigInvalid, "term " + t[0].dump() + " exceeds maxdeg " + std::to_string(maxdeg));
    }
    s.add_to(idx, Complex(t[1].get<double>(), t[2].get<double>()));
  }
  return s;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::IoError, "cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::IoError, "write to " + path.string() + " failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace bergman
