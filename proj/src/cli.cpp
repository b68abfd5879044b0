#include "moranfrac/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>

#include "moranfrac/errors.hpp"
#include "moranfrac/estimators.hpp"
#include "moranfrac/multifractal.hpp"
#include "moranfrac/numeric.hpp"
#include "moranfrac/theory.hpp"

namespace moranfrac::cli {

using json = nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<double> doubles(const json& v, const std::string& key) {
  if (!v.is_array() || v.empty()) throw ConfigError("config key \"" + key + "\" must be a non-empty number array");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError("config key \"" + key + "\" must contain numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key \"" + key + "\" must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config key \"" + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key \"" + key + "\" must be a string");
  return v.get<std::string>();
}

CoefficientModel parse_model(const json& m) {
  if (!m.is_object()) throw ConfigError("config key \"model\" must be an object");
  const std::string kind = m.contains("kind") ? text(m["kind"], "model.kind") : "constant";
  auto need = [&](const char* key) -> const json& {
    if (!m.contains(key)) throw ConfigError(std::string("model is missing \"") + key + "\"");
    return m[key];
  };
  if (kind == "constant") {
    for (const auto& [key, value] : m.items()) {
      if (key != "kind" && key != "p" && key != "r") throw ConfigError("unknown model key \"" + key + "\"");
    }
    return CoefficientModel::constant(doubles(need("p"), "model.p"), doubles(need("r"), "model.r"));
  }
  if (kind == "affine") {
    for (const auto& [key, value] : m.items()) {
      if (key != "kind" && key != "p_left" && key != "p_right" && key != "r_left" && key != "r_right") {
        throw ConfigError("unknown model key \"" + key + "\"");
      }
    }
    return CoefficientModel::affine(doubles(need("p_left"), "model.p_left"), doubles(need("p_right"), "model.p_right"),
                                    doubles(need("r_left"), "model.r_left"), doubles(need("r_right"), "model.r_right"));
  }
  throw ConfigError("model.kind must be \"constant\" or \"affine\", got \"" + kind + "\"");
}

GapLayout parse_layout(const std::string& s) {
  if (s == "equal") return GapLayout::equal;
  if (s == "left_flush") return GapLayout::left_flush;
  throw ConfigError("layout must be \"equal\" or \"left_flush\", got \"" + s + "\"");
}

std::string layout_name(GapLayout layout) { return layout == GapLayout::equal ? "equal" : "left_flush"; }

json to_json(const MoranConfig& c) {
  json model;
  if (c.model.kind() == ModelKind::constant) {
    model = {{"kind", "constant"}, {"p", c.model.p_left()}, {"r", c.model.r_left()}};
  } else {
    model = {{"kind", "affine"},
             {"p_left", c.model.p_left()},
             {"p_right", c.model.p_right()},
             {"r_left", c.model.r_left()},
             {"r_right", c.model.r_right()}};
  }
  return {{"m", c.model.m()},         {"model", model},       {"gap", c.gap},
          {"depth", c.depth},         {"kappa", c.kappa},     {"layout", layout_name(c.layout)},
          {"cell_budget", c.cell_budget}};
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// NaN and infinities become JSON null.
json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv(double v) { return std::isnan(v) ? "nan" : format_double(v); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::string out_path;
  std::string manifest_path;
  std::uint64_t seed = 1;
  std::optional<int> depth;
};

void add_common(CLI::App* sub, Common& c, bool with_config = true) {
  if (with_config) {
    sub->add_option("--config", c.config_path, "JSON construction config (defaults apply when omitted)")
        ->check(CLI::ExistingFile);
    sub->add_option("--depth", c.depth, "override the config depth")->check(CLI::NonNegativeNumber);
  }
  sub->add_option("--out", c.out_path, "output file (stdout when omitted)");
  sub->add_option("--manifest", c.manifest_path, "run manifest path (default <out>.manifest.json, else stderr)");
  sub->add_option("--seed", c.seed, "random seed");
}

MoranConfig load_config(const Common& c) {
  MoranConfig config = c.config_path.empty() ? MoranConfig{} : parse_config(read_file(c.config_path));
  if (c.depth) config.depth = *c.depth;
  config.validate();
  return config;
}

// Collects the primary output and writes it together with the manifest.
class Run {
 public:
  Run(std::string command, const Common& common, std::ostream& out, std::ostream& err)
      : command_(std::move(command)), common_(common), out_(out), err_(err) {}

  std::ostringstream body;
  json parameters = json::object();
  json results = json::object();
  std::optional<MoranConfig> config;

  void finish(int exit_code) {
    if (common_.out_path.empty()) {
      out_ << body.str();
    } else {
      std::ofstream file(common_.out_path);
      if (!file) throw ConfigError("cannot write \"" + common_.out_path + "\"");
      file << body.str();
    }
    json manifest = {{"command", command_}, {"seed", common_.seed}, {"parameters", parameters},
                     {"results", results},  {"exit_code", exit_code}};
    manifest["outputs"] = common_.out_path.empty() ? json::array({"-"}) : json::array({common_.out_path});
    if (config) {
      const std::string canonical = config_to_json(*config);
      manifest["config"] = json::parse(canonical);
      manifest["config_hash"] = hex64(fnv1a64(canonical));
    }
    std::string path = common_.manifest_path;
    if (path.empty() && !common_.out_path.empty()) path = common_.out_path + ".manifest.json";
    if (path.empty()) {
      err_ << manifest.dump() << '\n';
      return;
    }
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot write \"" + path + "\"");
    file << manifest.dump(2) << '\n';
  }

 private:
  std::string command_;
  const Common& common_;
  std::ostream& out_;
  std::ostream& err_;
};

struct BallOption {
  std::vector<double> values;
  std::optional<Region> region() const {
    if (values.empty()) return std::nullopt;
    if (values[1] <= 0.0) throw ConfigError("--ball radius must be positive");
    return Region::in_ball(values[0], values[1]);
  }
};

void add_ball(CLI::App* sub, BallOption& b) {
  sub->add_option("--ball", b.values, "restrict to the closed ball B(x, r): --ball x r")->expected(2);
}

struct WindowOption {
  std::optional<int> first, last;
  Window resolve(const MoranTree& tree) const {
    Window w = default_window(tree);
    if (first) w.first = *first;
    if (last) w.last = *last;
    if (w.first < 0 || w.last < w.first) throw ConfigError("empty scale window");
    if (w.last > tree.max_scale()) {
      throw ConfigError("window end " + std::to_string(w.last) + " exceeds the largest available scale " +
                        std::to_string(tree.max_scale()) + " at depth " + std::to_string(tree.depth()));
    }
    return w;
  }
};

void add_window(CLI::App* sub, WindowOption& w) {
  sub->add_option("--window-first", w.first, "first dyadic scale of the regression window");
  sub->add_option("--window-last", w.last, "last dyadic scale of the regression window");
}

const std::map<std::string, ScaleAxis> kAxes{{"section", ScaleAxis::section}, {"dyadic", ScaleAxis::dyadic}};

std::optional<LocalCoefficients> theory_coefficients(const MoranConfig& config, const std::optional<Region>& ball) {
  if (ball) return config.model.at(ball->ball.center);
  if (config.model.kind() == ModelKind::constant) return config.model.at(0.0);
  return std::nullopt;
}

std::vector<double> q_grid(const std::optional<double>& lo, const std::optional<double>& hi,
                           const std::optional<double>& step, const std::vector<double>& list) {
  if (!list.empty()) return list;
  if (!lo && !hi && !step) return {-2.0, -1.0, -0.5, 0.0, 0.5, 0.8, 1.0, 1.2, 2.0, 3.0};
  if (!lo || !hi || !step) throw ConfigError("--q-min, --q-max and --q-step go together");
  if (*step <= 0.0 || *hi < *lo) throw ConfigError("invalid q grid");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((*hi - *lo) / *step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(*lo + static_cast<double>(i) * *step);
  return out;
}

struct QOptions {
  std::optional<double> lo, hi, step;
  std::vector<double> list;
};

void add_q(CLI::App* sub, QOptions& q) {
  sub->add_option("--q", q.list, "explicit list of q values");
  sub->add_option("--q-min", q.lo, "q grid start");
  sub->add_option("--q-max", q.hi, "q grid end (inclusive)");
  sub->add_option("--q-step", q.step, "q grid step");
}

void write_spectrum_rows(std::ostream& os, const SpectrumEstimate& e, double theory, const std::string& prefix) {
  for (std::size_t i = 0; i < e.n.size(); ++i) {
    os << prefix << csv(e.q) << ',' << e.n[i] << ',' << csv(e.delta[i]) << ',' << csv(e.log_s[i]) << ','
       << csv(e.tau_scale[i]) << ',' << csv(e.tau_slope) << ',' << csv(e.tau_stderr) << ',' << csv(theory) << '\n';
  }
}

json window_json(const Window& w) { return {{"first", w.first}, {"last", w.last}}; }

}  // namespace

MoranConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  MoranConfig config;
  try {
    for (const auto& [key, value] : root.items()) {
      if (key == "model") {
        config.model = parse_model(value);
      } else if (key == "gap") {
        config.gap = number(value, key);
      } else if (key == "depth") {
        const auto d = integer(value, key);
        if (d < 0 || d > 64) throw ConfigError("depth must lie in [0, 64]");
        config.depth = static_cast<int>(d);
      } else if (key == "kappa") {
        config.kappa = number(value, key);
      } else if (key == "layout") {
        config.layout = parse_layout(text(value, key));
      } else if (key == "cell_budget") {
        const auto b = integer(value, key);
        if (b <= 0) throw ConfigError("cell_budget must be positive");
        config.cell_budget = static_cast<std::uint64_t>(b);
      } else if (key != "m") {
        throw ConfigError("unknown config key \"" + key + "\"");
      }
    }
    if (root.contains("m") && integer(root["m"], "m") != config.model.m()) {
      throw ConfigError("m = " + root["m"].dump() + " does not match the model's " + std::to_string(config.model.m()) +
                        " children");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  config.validate();
  return config;
}

std::string config_to_json(const MoranConfig& config) { return to_json(config).dump(); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moran measures on [0,1]: constructions, dimension estimates and verification suites", "moranfrac"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "moranfrac 1.0");

  Common common;
  std::function<int()> action;

  // construct
  bool all_levels = false, conditions = false;
  auto* construct = app.add_subcommand("construct", "build the tree and write its cells as CSV");
  add_common(construct, common);
  construct->add_flag("--all-levels", all_levels, "write every level, not only the leaves");
  construct->add_flag("--conditions", conditions, "run the structural condition checks into the manifest");
  construct->callback([&] {
    action = [&] {
      Run r("construct", common, out, err);
      r.config = load_config(common);
      const MoranTree tree = MoranTree::build(*r.config);
      r.body << "word,a,b,diam,log_mass\n";
      for (int k = all_levels ? 0 : tree.depth(); k <= tree.depth(); ++k) {
        const auto& level = tree.level(k);
        for (std::uint64_t i = 0; i < level.size(); ++i) {
          const MoranCell& c = level[i];
          r.body << to_string(tree.word(k, i)) << ',' << csv(c.a) << ',' << csv(c.b()) << ',' << csv(c.diam) << ','
                 << csv(c.log_mass) << '\n';
        }
      }
      r.parameters = {{"all_levels", all_levels}, {"conditions", conditions}};
      r.results = {{"depth", tree.depth()},     {"leaves", tree.level(tree.depth()).size()},
                   {"c0", tree.c0()},           {"c1", tree.c1()},
                   {"lambda", tree.c0() * tree.c1() + 1.0}, {"max_scale", tree.max_scale()}};
      if (conditions) {
        ConditionOptions options;
        options.seed = common.seed;
        const ConditionReport rep = verify_conditions(tree, options);
        auto range = [](const RangeStats& s) {
          return json{{"min", number_or_null(s.min)}, {"max", number_or_null(s.max)},
                      {"mean", number_or_null(s.mean)}, {"count", s.count}};
        };
        json slopes = json::array();
        for (const M8Sample& s : rep.m8_samples) slopes.push_back(number_or_null(s.slope_ratio));
        r.results["conditions"] = {{"disjoint_children", rep.disjoint_children},
                                   {"min_gap_fraction", rep.min_gap_fraction},
                                   {"inner_ball_contained", rep.inner_ball_contained},
                                   {"max_diam_ratio", rep.max_diam_ratio},
                                   {"max_mass_error", rep.max_mass_error},
                                   {"m6", range(rep.m6)},
                                   {"m7", range(rep.m7)},
                                   {"m8", range(rep.m8)},
                                   {"m8_slope_ratios", slopes}};
      }
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // spectrum
  QOptions spectrum_q;
  WindowOption spectrum_window;
  BallOption spectrum_ball;
  std::string spectrum_axis = "section";
  auto* spectrum = app.add_subcommand("spectrum", "L^q spectrum tau(q) from section moment sums");
  add_common(spectrum, common);
  add_q(spectrum, spectrum_q);
  add_window(spectrum, spectrum_window);
  add_ball(spectrum, spectrum_ball);
  spectrum->add_option("--axis", spectrum_axis, "regression abscissa")->check(CLI::IsMember({"section", "dyadic"}));
  spectrum->callback([&] {
    action = [&] {
      Run r("spectrum", common, out, err);
      r.config = load_config(common);
      const MoranTree tree = MoranTree::build(*r.config);
      const Window window = spectrum_window.resolve(tree);
      const auto ball = spectrum_ball.region();
      const auto qs = q_grid(spectrum_q.lo, spectrum_q.hi, spectrum_q.step, spectrum_q.list);
      const auto coefficients = theory_coefficients(*r.config, ball);
      const auto estimates = tau_spectrum(tree, ball.value_or(Region::whole_space()), qs, window, kAxes.at(spectrum_axis));
      r.body << "q,n,delta,log_S,tau_scale,tau_slope,tau_stderr,tau_theory\n";
      json summary = json::array();
      for (const SpectrumEstimate& e : estimates) {
        const double theory = coefficients ? solve_tau(*coefficients, e.q) : kNan;
        write_spectrum_rows(r.body, e, theory, "");
        summary.push_back({{"q", e.q}, {"tau_slope", number_or_null(e.tau_slope)},
                           {"tau_theory", number_or_null(theory)}});
      }
      r.parameters = {{"q", qs}, {"window", window_json(window)}, {"axis", spectrum_axis},
                      {"ball", spectrum_ball.values}};
      r.results = {{"tau", summary}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // local-spectrum
  QOptions local_q;
  WindowOption local_window;
  double local_x = 0.0;
  std::vector<double> local_radii{0.25, 0.125};
  std::string local_axis = "section";
  auto* local = app.add_subcommand("local-spectrum", "tau(q) restricted to balls B(x, r) of decreasing radius");
  add_common(local, common);
  add_q(local, local_q);
  add_window(local, local_window);
  local->add_option("--x", local_x, "ball centre")->required()->check(CLI::Range(0.0, 1.0));
  local->add_option("--radii", local_radii, "ball radii, decreasing, each in (0, 1)");
  local->add_option("--axis", local_axis, "regression abscissa")->check(CLI::IsMember({"section", "dyadic"}));
  local->callback([&] {
    action = [&] {
      Run r("local-spectrum", common, out, err);
      r.config = load_config(common);
      const MoranTree tree = MoranTree::build(*r.config);
      const Window window = local_window.resolve(tree);
      const auto qs = q_grid(local_q.lo, local_q.hi, local_q.step, local_q.list);
      const LocalCoefficients coefficients = r.config->model.at(local_x);
      r.body << "radius,q,n,delta,log_S,tau_scale,tau_slope,tau_stderr,tau_theory\n";
      json summary = json::array();
      for (double q : qs) {
        const double theory = solve_tau(coefficients, q);
        const auto estimates = tau_local(tree, local_x, q, local_radii, window, kAxes.at(local_axis));
        for (std::size_t i = 0; i < estimates.size(); ++i) {
          write_spectrum_rows(r.body, estimates[i], theory, csv(local_radii[i]) + ",");
          summary.push_back({{"q", q}, {"radius", local_radii[i]}, {"tau_slope", number_or_null(estimates[i].tau_slope)},
                             {"tau_theory", theory}});
        }
      }
      r.parameters = {{"x", local_x}, {"radii", local_radii}, {"q", qs}, {"window", window_json(window)},
                      {"axis", local_axis}};
      r.results = {{"tau", summary}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // entropy
  WindowOption entropy_window;
  BallOption entropy_ball;
  std::string entropy_axis = "section";
  auto* entropy = app.add_subcommand("entropy", "entropy dimension from section cell masses");
  add_common(entropy, common);
  add_window(entropy, entropy_window);
  add_ball(entropy, entropy_ball);
  entropy->add_option("--axis", entropy_axis, "regression abscissa")->check(CLI::IsMember({"section", "dyadic"}));
  entropy->callback([&] {
    action = [&] {
      Run r("entropy", common, out, err);
      r.config = load_config(common);
      const MoranTree tree = MoranTree::build(*r.config);
      const Window window = entropy_window.resolve(tree);
      const auto ball = entropy_ball.region();
      const EntropyEstimate e =
          entropy_dim(tree, ball.value_or(Region::whole_space()), window, kAxes.at(entropy_axis));
      r.body << "n,delta,numerator,denominator,ratio\n";
      for (std::size_t i = 0; i < e.n.size(); ++i) {
        r.body << e.n[i] << ',' << csv(e.delta[i]) << ',' << csv(e.numerator[i]) << ',' << csv(e.denominator[i]) << ','
               << csv(e.ratio[i]) << '\n';
      }
      const auto coefficients = theory_coefficients(*r.config, ball);
      r.parameters = {{"window", window_json(window)}, {"axis", entropy_axis}, {"ball", entropy_ball.values}};
      r.results = {{"slope", number_or_null(e.slope)},
                   {"lower", number_or_null(e.lower)},
                   {"upper", number_or_null(e.upper)},
                   {"theory", coefficients ? number_or_null(entropy_dim_formula(*coefficients)) : json(nullptr)}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // legendre
  QOptions legendre_q;
  std::string curve = "tau";
  double legendre_x = 0.0;
  double legendre_step = 0.01;
  auto* legendre_cmd = app.add_subcommand("legendre", "closed-form tau(q), alpha(q) and f(alpha) at a point");
  add_common(legendre_cmd, common);
  add_q(legendre_cmd, legendre_q);
  legendre_cmd->add_option("--curve", curve, "tau: q,tau,alpha,f rows; legendre: alpha,q_star,f rows")
      ->check(CLI::IsMember({"tau", "legendre"}));
  legendre_cmd->add_option("--x", legendre_x, "point at which the coefficients are evaluated")
      ->check(CLI::Range(0.0, 1.0));
  legendre_cmd->add_option("--alpha-step", legendre_step, "alpha grid step for the legendre curve")
      ->check(CLI::PositiveNumber);
  legendre_cmd->callback([&] {
    action = [&] {
      Run r("legendre", common, out, err);
      r.config = load_config(common);
      const LocalCoefficients c = r.config->model.at(legendre_x);
      const AlphaBounds bounds = alpha_bounds(c);
      std::size_t skipped = 0;
      if (curve == "tau") {
        const auto qs = q_grid(legendre_q.lo, legendre_q.hi, legendre_q.step, legendre_q.list);
        r.body << "q,tau,alpha,f\n";
        for (double q : qs) {
          const double tau = solve_tau(c, q);
          const double alpha = tau_derivative(c, q, tau);
          r.body << csv(q) << ',' << csv(tau) << ',' << csv(alpha) << ',' << csv(alpha * q - tau) << '\n';
        }
        r.parameters = {{"curve", curve}, {"x", legendre_x}, {"q", qs}};
      } else {
        r.body << "alpha,q_star,f\n";
        for (double a : alpha_grid(bounds.min, bounds.max, legendre_step)) {
          if (a <= bounds.min || a >= bounds.max) continue;
          try {
            const LegendrePoint pt = legendre(c, a);
            r.body << csv(pt.alpha) << ',' << csv(pt.q_star) << ',' << csv(pt.f) << '\n';
          } catch (const DomainError&) {
            ++skipped;
          }
        }
        r.parameters = {{"curve", curve}, {"x", legendre_x}, {"alpha_step", legendre_step}};
      }
      r.results = {{"alpha_min", bounds.min},
                   {"alpha_max", bounds.max},
                   {"entropy_dim", entropy_dim_formula(c)},
                   {"skipped_alpha", skipped}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // coarse
  std::optional<int> coarse_n;
  double coarse_epsilon = 0.05, coarse_step = 0.005, coarse_band = 0.1;
  std::optional<double> coarse_alpha_min, coarse_alpha_max;
  std::string coarse_norm = "cell";
  BallOption coarse_ball;
  auto* coarse = app.add_subcommand("coarse", "coarse multifractal spectrum compared with the Legendre transform");
  add_common(coarse, common);
  add_ball(coarse, coarse_ball);
  coarse->add_option("--n", coarse_n, "dyadic scale (default: largest available)");
  coarse->add_option("--epsilon", coarse_epsilon, "exponent half-width, raised to 2/n when smaller")
      ->check(CLI::PositiveNumber);
  coarse->add_option("--alpha-step", coarse_step, "alpha grid step")->check(CLI::PositiveNumber);
  coarse->add_option("--alpha-min", coarse_alpha_min, "alpha grid start");
  coarse->add_option("--alpha-max", coarse_alpha_max, "alpha grid end");
  coarse->add_option("--band", coarse_band, "interior band excluded from the sup norm")
      ->check(CLI::NonNegativeNumber);
  coarse->add_option("--normalization", coarse_norm, "exponent normalization")
      ->check(CLI::IsMember({"cell", "dyadic"}));
  coarse->callback([&] {
    action = [&] {
      Run r("coarse", common, out, err);
      r.config = load_config(common);
      const MoranTree tree = MoranTree::build(*r.config);
      const int n = coarse_n.value_or(tree.max_scale());
      if (n < 1 || n > tree.max_scale()) {
        throw ConfigError("--n must lie in [1, " + std::to_string(tree.max_scale()) + "]");
      }
      const auto ball = coarse_ball.region();
      const auto coefficients = theory_coefficients(*r.config, ball);
      double lo = 0.0, hi = 3.0;
      if (coefficients) {
        const AlphaBounds b = alpha_bounds(*coefficients);
        lo = b.min - 0.2;
        hi = b.max + 0.2;
      }
      lo = coarse_alpha_min.value_or(std::max(0.0, lo));
      hi = coarse_alpha_max.value_or(hi);
      if (hi <= lo) throw ConfigError("empty alpha grid");
      const double eps = effective_epsilon(coarse_epsilon, n);
      const auto norm = coarse_norm == "cell" ? CoarseNormalization::cell : CoarseNormalization::dyadic;
      const CoarseSpectrum s =
          coarse_spectrum(tree, ball.value_or(Region::whole_space()), n, eps, alpha_grid(lo, hi, coarse_step), norm);
      r.body << "alpha,count,f_emp,f_theory,deviation\n";
      if (coefficients) {
        const LegendreComparison cmp = compare_legendre(s, *coefficients, coarse_band);
        for (std::size_t i = 0; i < cmp.alpha.size(); ++i) {
          r.body << csv(cmp.alpha[i]) << ',' << cmp.count[i] << ',' << csv(cmp.f_emp[i]) << ',' << csv(cmp.f_theory[i])
                 << ',' << csv(cmp.deviation[i]) << '\n';
        }
        r.results = {{"sup_norm", number_or_null(cmp.sup_norm)}, {"max_f_emp", cmp.max_f_emp}};
      } else {
        double max_f = 0.0;
        for (std::size_t i = 0; i < s.alpha.size(); ++i) {
          r.body << csv(s.alpha[i]) << ',' << s.count[i] << ',' << csv(s.f[i]) << ",nan,nan\n";
          max_f = std::max(max_f, s.f[i]);
        }
        r.results = {{"sup_norm", nullptr}, {"max_f_emp", max_f}};
      }
      r.results["cells"] = s.cells;
      r.results["log_scale"] = s.log_scale;
      r.parameters = {{"n", n},           {"epsilon", coarse_epsilon}, {"effective_epsilon", eps},
                      {"alpha_step", coarse_step}, {"band", coarse_band}, {"normalization", coarse_norm},
                      {"ball", coarse_ball.values}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // nu-sample
  std::optional<double> nu_alpha, nu_alpha_q;
  std::size_t nu_samples = 200;
  int nu_depth = 25;
  unsigned nu_threads = 0;
  auto* nu = app.add_subcommand("nu-sample", "sample points from the auxiliary measure of a level set");
  add_common(nu, common, false);
  nu->add_option("--config", common.config_path, "JSON construction config")->check(CLI::ExistingFile);
  auto* alpha_opt = nu->add_option("--alpha", nu_alpha, "target local dimension");
  nu->add_option("--alpha-q", nu_alpha_q, "use alpha = tau'(q) at the left end point")->excludes(alpha_opt);
  nu->add_option("--samples", nu_samples, "number of samples")->check(CLI::PositiveNumber);
  nu->add_option("--depth", nu_depth, "descent depth")->check(CLI::Range(1, 1000));
  nu->add_option("--threads", nu_threads, "worker threads (0: hardware concurrency)");
  nu->callback([&] {
    action = [&] {
      Run r("nu-sample", common, out, err);
      MoranConfig config = common.config_path.empty() ? MoranConfig{} : parse_config(read_file(common.config_path));
      config.depth = nu_depth;
      r.config = config;
      double alpha;
      if (nu_alpha) {
        alpha = *nu_alpha;
      } else {
        const LocalCoefficients c = config.model.at(0.0);
        const double q = nu_alpha_q.value_or(2.0);
        alpha = tau_derivative(c, q, solve_tau(c, q));
      }
      const NuSampleReport rep = nu_sample(config, alpha, nu_samples, nu_depth, common.seed, nu_threads);
      r.body << "sample_id,point,dim_mu,dim_nu\n";
      for (const NuSample& s : rep.samples) {
        r.body << s.id << ',' << csv(s.point) << ',' << csv(s.dim_mu) << ',' << csv(s.dim_nu) << '\n';
      }
      r.parameters = {{"alpha", alpha}, {"samples", nu_samples}, {"depth", nu_depth}};
      r.results = {{"mean_dim_mu", rep.mean_mu}, {"mean_dim_nu", rep.mean_nu}, {"sd_dim_mu", rep.sd_mu},
                   {"sd_dim_nu", rep.sd_nu},     {"outside", rep.outside},    {"last_scale", rep.last_scale}};
      r.finish(kExitOk);
      return kExitOk;
    };
  });

  // verify
  std::string suite;
  auto* verify = app.add_subcommand("verify", "run a verification suite; exit 1 when any check fails");
  add_common(verify, common, false);
  verify->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  verify->callback([&] {
    action = [&] {
      Run r("verify", common, out, err);
      const SuiteResult result = run_suite(suite, common.seed);
      json checks = json::array();
      for (const Check& c : result.checks) {
        checks.push_back({{"name", c.name},
                          {"pass", c.pass},
                          {"measured", number_or_null(c.measured)},
                          {"threshold", number_or_null(c.threshold)},
                          {"relation", c.relation},
                          {"slack", number_or_null(c.slack)}});
      }
      const bool pass = result.pass();
      r.body << json{{"suite", suite}, {"seed", common.seed}, {"pass", pass}, {"checks", checks}}.dump(2) << '\n';
      r.parameters = {{"suite", suite}};
      r.results = {{"pass", pass}, {"checks", result.checks.size()}};
      const int code = pass ? kExitOk : kExitVerificationFailed;
      r.finish(code);
      return code;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    return action();
  } catch (const ResourceError& e) {
    err << "moranfrac: resource budget exceeded: " << e.what() << '\n';
    return kExitResourceBudget;
  } catch (const SectionIncomplete& e) {
    err << "moranfrac: " << e.what() << "; increase depth or shrink the window\n";
    return kExitConfigError;
  } catch (const ConfigError& e) {
    err << "moranfrac: config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "moranfrac: invalid argument: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NoSupport& e) {
    err << "moranfrac: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace moranfrac::cli
