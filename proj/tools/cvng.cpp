// cvng: experiment configs in, reproducible CSV/JSON plot data and reports
// out. Every command is a pure function of its config file; exit codes are
// 0 on success, 2 on validation failures, 3 on numerical non-convergence.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "cvng/correlations.hpp"
#include "cvng/sampler.hpp"
#include "cvng/witnesses.hpp"
#include "state_spec.hpp"

using json = nlohmann::ordered_json;
using namespace cvng;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void reject_unknown_fields(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown field '" + it.key() + "' in " + where);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("output: cannot open '" + path + "'");
  out << content;
}

int worker_threads() {
  if (const char* env = std::getenv("CVNG_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 2;
}

// ---------------------------------------------------------------------------
// cvng wigner
// ---------------------------------------------------------------------------

struct AxisGrid {
  double min, max, step;
  std::vector<double> ticks() const {
    std::vector<double> t;
    for (double v = min; v <= max + 1e-12 * std::max(1.0, std::abs(max)); v += step)
      t.push_back(v);
    return t;
  }
};

AxisGrid parse_axis(const json& j, const std::string& where) {
  reject_unknown_fields(j, {"min", "max", "step"}, where);
  AxisGrid g{j.at("min").get<double>(), j.at("max").get<double>(), j.at("step").get<double>()};
  if (g.step <= 0 || g.max <= g.min)
    throw std::invalid_argument("config: bad grid in " + where);
  return g;
}

int cmd_wigner(const json& cfg, const std::string& out_path) {
  reject_unknown_fields(cfg, {"state", "grid", "axes", "out"}, "wigner config");
  auto state = cli::parse_state(cfg.at("state").get<std::string>());
  WignerForm form = state.form;
  if (cfg.contains("axes")) {
    std::vector<int> axes = cfg.at("axes").get<std::vector<int>>();
    form = form.marginal(axes);
  }
  const int n = form.nvars();
  std::vector<AxisGrid> grids;
  const json& g = cfg.at("grid");
  if (g.is_array()) {
    if (static_cast<int>(g.size()) != n)
      throw std::invalid_argument("config: grid arity does not match the state");
    for (int i = 0; i < n; ++i) grids.push_back(parse_axis(g[i], "grid"));
  } else {
    for (int i = 0; i < n; ++i) grids.push_back(parse_axis(g, "grid"));
  }

  std::string csv;
  for (int i = 0; i < n; ++i)
    csv += (i % 2 == 0 ? "x" : "p") + std::to_string(i / 2 + 1) + ",";
  csv += "W\n";
  std::vector<std::vector<double>> ticks;
  for (const auto& gr : grids) ticks.push_back(gr.ticks());
  std::vector<size_t> idx(n, 0);
  Vec pt(n);
  // Row-major sweep: the last axis varies fastest.
  while (true) {
    std::string row;
    for (int i = 0; i < n; ++i) {
      pt[i] = ticks[i][idx[i]];
      row += fmt(pt[i]) + ",";
    }
    row += fmt(form.value(pt)) + "\n";
    csv += row;
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == ticks[axis].size()) {
      idx[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
  write_file(out_path, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// cvng fig4 / fig5
// ---------------------------------------------------------------------------

int cmd_fig4(const json& cfg, const std::string& out_path) {
  reject_unknown_fields(cfg, {"db_min", "db_max", "points", "out"}, "fig4 config");
  double db_min = cfg.value("db_min", 0.0);
  double db_max = cfg.value("db_max", 30.0);
  int points = cfg.value("points", 121);
  if (points < 2 || db_max <= db_min)
    throw std::invalid_argument("config: bad fig4 range");
  auto curves = fig4_curves(db_min, db_max, points);
  std::string csv = "s_dB,delta_E_R,variant\n";
  for (const auto& p : curves)
    csv += fmt(p.x) + "," + fmt(p.y) + "," + p.variant + "\n";
  write_file(out_path, csv);
  return 0;
}

int cmd_fig5(const json& cfg, const std::string& out_path) {
  reject_unknown_fields(cfg, {"points", "out"}, "fig5 config");
  int points = cfg.value("points", 101);
  if (points < 2) throw std::invalid_argument("config: bad fig5 point count");
  auto curves = fig5_curves(points);
  std::string csv = "theta,E_R,config\n";
  for (const auto& p : curves)
    csv += fmt(p.x) + "," + fmt(p.y) + "," + p.variant + "\n";
  write_file(out_path, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// cvng sample
// ---------------------------------------------------------------------------

GaussianChannel parse_channel(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "loss") {
    reject_unknown_fields(j, {"type", "modes", "eta"}, "channel");
    int m = static_cast<int>(j.at("modes").size());
    return loss_channel(j.at("eta").get<double>(), m);
  }
  if (type == "beamsplitter") {
    reject_unknown_fields(j, {"type", "modes", "theta"}, "channel");
    if (j.at("modes").size() != 2)
      throw std::invalid_argument("config: beamsplitter needs two modes");
    double th = j.at("theta").get<double>();
    Mat S = fock::gate_symplectic(2, fock::Gate::beamsplitter(0, 1, th));
    return symplectic_channel(S);
  }
  if (type == "two_mode_squeezer") {
    reject_unknown_fields(j, {"type", "modes", "theta"}, "channel");
    if (j.at("modes").size() != 2)
      throw std::invalid_argument("config: two_mode_squeezer needs two modes");
    return symplectic_channel(two_mode_squeezer(j.at("theta").get<double>()));
  }
  if (type == "squeezer") {
    reject_unknown_fields(j, {"type", "modes", "s"}, "channel");
    if (j.at("modes").size() != 1)
      throw std::invalid_argument("config: squeezer acts on one mode");
    double s = j.at("s").get<double>();
    Mat S(2, 2);
    S << std::sqrt(s), 0, 0, 1.0 / std::sqrt(s);
    return symplectic_channel(S);
  }
  if (type == "displacement") {
    reject_unknown_fields(j, {"type", "modes", "x", "p"}, "channel");
    if (j.at("modes").size() != 1)
      throw std::invalid_argument("config: displacement acts on one mode");
    GaussianChannel ch = identity_channel(1);
    ch.alpha << j.at("x").get<double>(), j.at("p").get<double>();
    return ch;
  }
  throw std::invalid_argument("config: unknown channel type '" + type + "'");
}

DetectorSpec parse_detector(const json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "heterodyne") return DetectorSpec::heterodyne();
    throw std::invalid_argument("config: unknown detector '" + s + "'");
  }
  reject_unknown_fields(j, {"type", "lambda"}, "detector");
  std::string type = j.at("type").get<std::string>();
  if (type == "onoff" || type == "noisy_onoff") {
    // no-click element (1-lambda)|0><0|, click element 1 - (1-lambda)|0><0|.
    // lambda = 0 is the ideal on-off pair whose click Wigner function is
    // negative at the origin; validation rejects it.
    double lambda = type == "onoff" ? 0.0 : j.at("lambda").get<double>();
    WignerForm noclick = vacuum_wigner(1);
    noclick.scale(1.0 - lambda);
    WignerForm click = identity_wigner(1);
    for (auto t : noclick.terms()) {
      t.w *= -1.0;
      click.add_term(std::move(t));
    }
    return DetectorSpec::discrete({noclick, click}, {"no-click", "click"});
  }
  throw std::invalid_argument("config: unknown detector type '" + type + "'");
}

int cmd_sample(const json& cfg, const std::string& out_path) {
  reject_unknown_fields(cfg, {"circuit", "n_samples", "seed", "record_chain", "out"},
                        "sample config");
  const json& cj = cfg.at("circuit");
  reject_unknown_fields(cj, {"inputs", "channels", "detectors"}, "circuit");
  Circuit circuit;
  for (const auto& s : cj.at("inputs"))
    circuit.inputs.push_back(cli::parse_state(s.get<std::string>()).form);
  if (cj.contains("channels"))
    for (const auto& ch : cj.at("channels"))
      circuit.channels.push_back(
          {ch.at("modes").get<std::vector<int>>(), parse_channel(ch)});
  for (const auto& d : cj.at("detectors")) circuit.detectors.push_back(parse_detector(d));

  RunConfig rc;
  rc.n_samples = cfg.at("n_samples").get<long>();
  rc.seed = cfg.value("seed", 0);
  rc.record_chain = cfg.value("record_chain", false);
  rc.streams = worker_threads();
  auto records = run(circuit, rc);

  // Records CSV.
  std::string csv = "sample_index";
  for (int k = 0; k < circuit.modes(); ++k) {
    if (circuit.detectors[k].kind == DetectorSpec::Kind::Heterodyne) {
      csv += ",out_x" + std::to_string(k + 1) + ",out_p" + std::to_string(k + 1);
    } else {
      csv += ",out_label" + std::to_string(k + 1);
    }
  }
  if (rc.record_chain) csv += ",chain";
  csv += "\n";
  for (size_t i = 0; i < records.size(); ++i) {
    csv += std::to_string(i);
    for (double o : records[i].outcomes) csv += "," + fmt(o);
    if (rc.record_chain) {
      csv += ",\"";
      for (size_t c = 0; c < records[i].chain.size(); ++c) {
        if (c) csv += ";";
        for (int q = 0; q < records[i].chain[c].size(); ++q) {
          if (q) csv += " ";
          csv += fmt(records[i].chain[c][q]);
        }
      }
      csv += "\"";
    }
    csv += "\n";
  }
  write_file(out_path, csv);

  // Summary JSON: empirical moments vs analytic targets with z-scores, for
  // the heterodyne outcomes. Second moments compose through the channels
  // regardless of input Gaussianity.
  const int m = circuit.modes();
  Vec xi = Vec::Zero(2 * m);
  Mat V = Mat::Identity(2 * m, 2 * m);
  for (int k = 0; k < m; ++k) {
    auto [mx, mv] = form_moments(circuit.inputs[k]);
    xi.segment(2 * k, 2) = mx;
    V.block(2 * k, 2 * k, 2, 2) = mv;
  }
  for (const auto& step : circuit.channels) {
    const int ns = static_cast<int>(step.modes.size());
    Mat X = Mat::Identity(2 * m, 2 * m);
    Mat Vc = Mat::Zero(2 * m, 2 * m);
    Vec al = Vec::Zero(2 * m);
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ns; ++j)
        X.block(2 * step.modes[i], 2 * step.modes[j], 2, 2) =
            step.ch.X.block(2 * i, 2 * j, 2, 2);
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < ns; ++j)
        Vc.block(2 * step.modes[i], 2 * step.modes[j], 2, 2) =
            step.ch.Vc.block(2 * i, 2 * j, 2, 2);
      al.segment(2 * step.modes[i], 2) = step.ch.alpha.segment(2 * i, 2);
    }
    V = X * V * X.transpose() + Vc;
    xi = X * xi + al;
  }

  json summary;
  summary["n_samples"] = rc.n_samples;
  summary["seed"] = rc.seed;
  json hmoments = json::array();
  long n = static_cast<long>(records.size());
  int col = 0;
  for (int k = 0; k < m; ++k) {
    if (circuit.detectors[k].kind != DetectorSpec::Kind::Heterodyne) {
      ++col;
      continue;
    }
    for (int q = 0; q < 2; ++q) {
      double target_mean = xi[2 * k + q];
      double target_var = V(2 * k + q, 2 * k + q) + 1.0;  // heterodyne adds vacuum noise
      double emp = 0.0;
      for (const auto& r : records) emp += r.outcomes[col + q];
      emp /= std::max(1L, n);
      double var = 0.0;
      for (const auto& r : records) var += std::pow(r.outcomes[col + q] - emp, 2);
      var /= std::max(1L, n - 1);
      double se_mean = std::sqrt(target_var / std::max(1L, n));
      double se_var = target_var * std::sqrt(2.0 / std::max(1L, n));
      json entry;
      entry["mode"] = k + 1;
      entry["quadrature"] = q == 0 ? "x" : "p";
      entry["empirical_mean"] = emp;
      entry["target_mean"] = target_mean;
      entry["z_mean"] = (emp - target_mean) / se_mean;
      entry["empirical_variance"] = var;
      entry["target_variance"] = target_var;
      entry["z_variance"] = (var - target_var) / se_var;
      hmoments.push_back(entry);
    }
    col += 2;
  }
  summary["heterodyne_moments"] = hmoments;
  write_file(out_path + ".summary.json", summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// cvng report
// ---------------------------------------------------------------------------

int cmd_report(const json& cfg, const std::string& out_path) {
  reject_unknown_fields(cfg, {"state", "negativity_tol", "out"}, "report config");
  auto state = cli::parse_state(cfg.at("state").get<std::string>());
  double tol = cfg.value("negativity_tol", 1e-6);
  const WignerForm& w = state.form;
  const int m = w.modes();

  auto [xi, V] = form_moments(w);
  double pur = overlap(w, w);
  double nbar = ((V - Mat::Identity(2 * m, 2 * m)).trace() + xi.squaredNorm()) / 4.0;
  double neg = negativity_volume(w, tol);
  double w0 = w.value(Vec::Zero(2 * m));

  json rep;
  rep["state"] = state.kind;
  rep["modes"] = m;
  rep["purity"] = pur;
  rep["mean_photon_number"] = nbar;
  rep["negativity_volume"] = neg;
  rep["log_negativity"] = std::log1p(neg);
  rep["wigner_at_origin"] = w0;
  rep["qng_certified"] = qng_energy_witness(w0, nbar, m);
  if (m == 2 && is_physical(V)) {
    GaussianState gs(xi, V);
    Bipartition part({0}, {1}, 2);
    rep["gaussian_moments"]["ppt_entangled"] = ppt_entangled(gs, part);
    rep["gaussian_moments"]["steerable_1_to_2"] = gaussian_steerable(gs, part).steerable;
    rep["gaussian_moments"]["steerable_2_to_1"] =
        gaussian_steerable(gs, Bipartition({1}, {0}, 2)).steerable;
  }
  write_file(out_path, rep.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvng: continuous-variable non-Gaussian phase-space toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_path, "output path (overrides config 'out')");
  };
  auto* wignercmd = app.add_subcommand("wigner", "evaluate a Wigner function on a grid");
  auto* fig4cmd = app.add_subcommand("fig4", "entanglement-gain curves");
  auto* fig5cmd = app.add_subcommand("fig5", "entanglement-creation curves");
  auto* samplecmd = app.add_subcommand("sample", "positive-Wigner circuit sampler");
  auto* reportcmd = app.add_subcommand("report", "one-shot state report");
  for (auto* sub : {wignercmd, fig4cmd, fig5cmd, samplecmd, reportcmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitValidation : 0;
  }

  try {
    json cfg = load_config(config_path);
    std::string out = !out_path.empty()  ? out_path
                      : cfg.contains("out") ? cfg.at("out").get<std::string>()
                                            : "";
    if (out.empty()) throw std::invalid_argument("config: no output path given");
    if (app.got_subcommand(wignercmd)) return cmd_wigner(cfg, out);
    if (app.got_subcommand(fig4cmd)) return cmd_fig4(cfg, out);
    if (app.got_subcommand(fig5cmd)) return cmd_fig5(cfg, out);
    if (app.got_subcommand(samplecmd)) return cmd_sample(cfg, out);
    if (app.got_subcommand(reportcmd)) return cmd_report(cfg, out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
