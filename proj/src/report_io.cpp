#include "lrfput/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "lrfput/errors.hpp"

namespace lrfput {

namespace fs = std::filesystem;

namespace {

// Shortest representation that round-trips.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string short_fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Null for non-finite values, which JSON cannot carry.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::ofstream open_out(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path);
  return os;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Json to_json(const DispersionProfile& p) {
  Json j;
  j["family"] = to_string(p.family);
  j["type1"] = p.type1_certified;
  j["c0_sq"] = num(p.c0_sq);
  j["lambda_dd0"] = num(p.lambda_dd0);
  j["sigma"] = num(p.sigma);
  j["sigma_fit"] = num(p.sigma_fit);
  j["k_star"] = num(p.k_star);
  j["mu_star"] = num(p.mu_star);
  j["sup_outside"] = num(p.sup_outside);
  j["lambda_lower"] = num(p.lambda_lower);
  j["conditions"] = {{"bounded_below", p.bounded_below},
                     {"concave_at_zero", p.concave_at_zero},
                     {"local_bounds", p.local_bounds},
                     {"subsonic_outside", p.subsonic_outside}};
  j["k_max"] = p.k_max;
  j["n_samples"] = p.n_samples;
  j["notes"] = p.notes;
  return j;
}

Json to_json(const AssumptionReport& r) {
  Json j;
  j["sum_abs_beta_m5"] = num(r.sum_abs_beta_m5);
  j["sum_abs_beta_m5_tail"] = num(r.sum_abs_beta_m5_tail);
  j["beta_m5_finite"] = r.beta_m5_finite;
  j["sum_gamma_m4"] = num(r.sum_gamma_m4);
  j["sum_gamma_m4_tail"] = num(r.sum_gamma_m4_tail);
  j["gamma_m4_finite"] = r.gamma_m4_finite;
  j["b"] = num(r.b);
  j["b_tail_bound"] = num(r.b_tail_bound);
  j["b_certified"] = r.b_certified;
  j["tails_within_tolerance"] = r.tails_within_tolerance;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const SweepReport& r) {
  Json j;
  j["slope"] = num(r.slope);
  j["intercept"] = num(r.intercept);
  j["n_ok"] = r.n_ok;
  j["fit_ok"] = r.fit_ok;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x;
    x["eps"] = row.eps;
    x["ok"] = row.ok;
    if (row.ok) {
      x["diff_H1"] = num(row.diff_H1);
      x["V_H1"] = num(row.V_H1);
      x["residual"] = num(row.residual);
      x["iterations"] = row.iterations;
    } else {
      x["error"] = row.error;
    }
    rows.push_back(x);
  }
  j["rows"] = rows;
  return j;
}

Json to_json(const WaveSolution& s) {
  Json j;
  j["eps"] = s.eps;
  j["sigma"] = s.sigma;
  j["c_eps_sq"] = s.c_eps_sq;
  j["method"] = to_string(s.method);
  j["residual_H1"] = num(s.residual_H1);
  j["iterations"] = s.iterations;
  j["linear_iterations"] = s.linear_iterations;
  j["monotone"] = s.monotone;
  j["nonpositive"] = s.nonpositive;
  j["parity_defect"] = num(std::max(s.W.parity_defect(), s.V.parity_defect()));
  j["W_H1"] = num(sobolev_norm(s.W, 1.0));
  j["V_H1"] = num(sobolev_norm(s.V, 1.0));
  j["increments"] = s.increments;
  j["grid"] = {{"L", s.W.grid().L()}, {"N", s.W.grid().N()}};
  return j;
}

Json to_json(const VerificationReport& r) {
  Json j;
  j["predicted_speed"] = num(r.predicted_speed);
  j["measured_speed"] = num(r.measured_speed);
  j["speed_error"] = num(r.speed_error);
  j["shape_error"] = num(r.shape_error);
  j["energy_drift"] = num(r.energy_drift);
  j["initial_energy"] = num(r.initial_energy);
  j["dt"] = r.dt;
  j["force_range"] = r.force_range;
  j["steps"] = r.steps;
  j["t_final"] = r.t_final;
  j["early_stop"] = r.early_stop;
  j["checkpoints"] = r.trajectory.size();
  return j;
}

Json model_summary(const LatticeModel& model) {
  Json j;
  j["family"] = to_string(model.family());
  if (auto a = model.cm_exponent()) j["a"] = *a;
  j["range"] = model.range();
  j["delta_star"] = model.delta_star();
  j["trunc_tol"] = model.trunc_tol();
  const TailBounds& t = model.tails();
  j["tails"] = {{"alpha_m2", num(t.alpha_m2)},
                {"beta_m3", num(t.beta_m3)},
                {"beta_m5", num(t.beta_m5)},
                {"gamma_m4", num(t.gamma_m4)}};
  const int shown = std::min(model.range(), 4);
  Json head = Json::array();
  for (int m = 1; m <= shown; ++m) {
    head.push_back({{"m", m},
                    {"alpha", model.alpha(m)},
                    {"beta", model.beta(m)},
                    {"gamma", model.gamma(m)},
                    {"varsigma", model.varsigma(m)}});
  }
  j["leading_coefficients"] = head;
  return j;
}

void write_json(const std::string& path, Json doc, const std::string& hash) {
  doc["config_hash"] = hash;
  auto os = open_out(path);
  os << doc.dump(2) << "\n";
}

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SpecError(path + ": " + e.what());
  }
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw SpecError("csv: missing column " + name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

void write_csv(const std::string& path, const CsvTable& table, const std::string& hash) {
  auto os = open_out(path);
  os << "# config_hash=" << hash << "\n";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << (c ? "," : "") << table.columns[c];
  }
  os << "\n";
  for (const auto& r : table.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) os << (c ? "," : "") << fmt(r[c]);
    os << "\n";
  }
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot read " + path);
  CsvTable t;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string cell;
    if (header) {
      while (std::getline(ls, cell, ',')) t.columns.push_back(cell);
      header = false;
      continue;
    }
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw SpecError(path + ": malformed value '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size()) throw SpecError(path + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable lambda_table(const LatticeModel& model, double k_max, int n_points) {
  const Dispersion disp(model);
  CsvTable t{{"k", "lambda"}, {}};
  for (int i = 0; i < n_points; ++i) {
    const double k = k_max * i / (n_points - 1);
    t.rows.push_back({k, disp.lambda(k)});
  }
  return t;
}

CsvTable profile_table(const WaveSolution& s, const Field& W0) {
  CsvTable t{{"x", "W", "V", "W0"}, {}};
  const Grid& g = s.W.grid();
  for (int n = 0; n < g.N(); ++n) t.rows.push_back({g.x(n), s.W[n], s.V[n], W0[n]});
  return t;
}

CsvTable sweep_table(const SweepReport& r) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CsvTable t{{"eps", "diff_H1", "residual", "iterations", "V_H1", "ok"}, {}};
  for (const auto& row : r.rows) {
    if (row.ok) {
      t.rows.push_back({row.eps, row.diff_H1, row.residual, static_cast<double>(row.iterations),
                        row.V_H1, 1.0});
    } else {
      t.rows.push_back({row.eps, nan, nan, 0.0, nan, 0.0});
    }
  }
  return t;
}

CsvTable trajectory_table(const VerificationReport& r) {
  CsvTable t{{"t", "peak_position", "peak_value", "energy"}, {}};
  for (const auto& p : r.trajectory) t.rows.push_back({p.t, p.peak_position, p.peak_value, p.energy});
  return t;
}

WaveSolution read_solution(const std::string& json_path) {
  const Json doc = read_json(json_path);
  try {
    const Grid grid(doc.at("grid").at("L").get<double>(), doc.at("grid").at("N").get<int>());
    WaveSolution s(grid);
    s.eps = doc.at("eps").get<double>();
    s.sigma = doc.at("sigma").get<double>();
    s.c_eps_sq = doc.at("c_eps_sq").get<double>();
    s.method = doc.at("method").get<std::string>() == "petviashvili" ? SolveMethod::Petviashvili
                                                                      : SolveMethod::Contraction;
    s.residual_H1 = doc.at("residual_H1").get<double>();
    s.iterations = doc.at("iterations").get<int>();
    const fs::path csv = fs::path(json_path).parent_path() / doc.at("profile").get<std::string>();
    const CsvTable t = read_csv(csv.string());
    const auto W = t.column("W");
    const auto V = t.column("V");
    if (static_cast<int>(W.size()) != grid.N()) throw SpecError(csv.string() + ": wrong row count");
    s.W = Field(grid, W);
    s.V = Field(grid, V);
    return s;
  } catch (const Json::exception& e) {
    throw SpecError(json_path + ": " + e.what());
  }
}

void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotSpec& spec,
               const std::string& hash) {
  constexpr double W = 640, H = 420, left = 80, right = 20, top = 40, bottom = 60;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1;
  if (!(y0 <= y1)) y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double v) { return left + (tx(v) - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double v) { return H - bottom - (ty(v) - y0) / (y1 - y0) * (H - top - bottom); };

  auto os = open_out(path);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<!-- config_hash=" << hash << " -->\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
     << escape_xml(spec.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right
     << "\" height=\"" << H - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    const double xl = spec.log_x ? std::pow(10.0, xv) : xv;
    const double yl = spec.log_y ? std::pow(10.0, yv) : yv;
    const double sx = px(xl), sy = py(yl);
    os << "<line x1=\"" << sx << "\" y1=\"" << H - bottom << "\" x2=\"" << sx << "\" y2=\""
       << H - bottom + 5 << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << sx << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">"
       << short_fmt(xl) << "</text>\n";
    os << "<line x1=\"" << left - 5 << "\" y1=\"" << sy << "\" x2=\"" << left << "\" y2=\"" << sy
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << left - 8 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\">"
       << short_fmt(yl) << "</text>\n";
  }
  os << "<text x=\"" << (W + left - right) / 2 << "\" y=\"" << H - 18
     << "\" text-anchor=\"middle\">" << escape_xml(spec.x_label) << "</text>\n";
  os << "<text x=\"18\" y=\"" << (H + top - bottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << (H + top - bottom) / 2 << ")\">" << escape_xml(spec.y_label) << "</text>\n";

  static const char* colors[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      os << short_fmt(px(s.x[i])) << "," << short_fmt(py(s.y[i])) << " ";
    }
    os << "\"/>\n";
    if (!s.label.empty()) {
      const double ly = top + 16 + 16.0 * k;
      os << "<line x1=\"" << W - right - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - right - 130
         << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << W - right - 124 << "\" y=\"" << ly << "\">" << escape_xml(s.label)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
}

}  // namespace lrfput
