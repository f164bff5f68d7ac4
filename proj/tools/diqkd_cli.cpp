// Command-line front end: key-length evaluation, channel simulation,
// parameter sweeps, threshold and minimum-data-size searches, EAT
// comparison, and the ion-trap re-analysis.
//
// Exit codes: 0 normal (key generated where applicable), 2 protocol abort,
// 1 validation error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "diqkd/channel.hpp"
#include "diqkd/report.hpp"
#include "diqkd/search.hpp"

namespace {

using namespace diqkd;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitAbort = 2;

std::string resolve_output_path(const std::string& path) {
  if (path.empty() || path == "-") return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  if (const char* dir = std::getenv("DIQKD_OUTPUT_DIR"); dir && *dir) {
    return (std::filesystem::path(dir) / p).string();
  }
  return path;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(resolve_output_path(path), std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Method parse_method(const std::string& name) {
  static const std::map<std::string, Method> table = {
      {"com-standard", Method::ComplementarityStandard},
      {"com-spotcheck", Method::ComplementaritySpotcheck},
      {"eat-original", Method::EatOriginal},
      {"eat-modified", Method::EatModified},
      {"distill-n", Method::DistillNoisy},
      {"distill-l", Method::DistillLoss},
      {"distill-c", Method::DistillCombined},
      {"distill-b", Method::DistillBStep},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw CLI::ValidationError("method", "unknown method: " + name);
  return it->second;
}

const char* kMethodNames =
    "com-standard, com-spotcheck, eat-original, eat-modified, distill-n, distill-l, "
    "distill-c, distill-b";

struct CommonOpts {
  double eta = 1.0;
  double eta_a = -1.0;
  double eta_b = -1.0;
  double e_d = 0.0;
  double n = 1e6;
  double eps_f = 5e-11;
  double eps_sound = 1e-5;
  double eps_c = 1e-2;
  double f_ec = 1.0;
  int bsteps = 5;
  std::string output;

  ChannelModel model() const {
    ChannelModel m = ChannelModel::ideal(eta, e_d);
    if (eta_a >= 0.0) m.eta_a = eta_a;
    if (eta_b >= 0.0) m.eta_b = eta_b;
    return m;
  }
};

void add_channel_opts(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--eta", o.eta, "symmetric transmittance")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--eta-a", o.eta_a, "Alice transmittance (overrides --eta)");
  cmd->add_option("--eta-b", o.eta_b, "Bob transmittance (overrides --eta)");
  cmd->add_option("--e-d", o.e_d, "depolarizing factor")->check(CLI::Range(0.0, 1.0));
}

JsonWriter config_echo(const CommonOpts& o) {
  JsonWriter cfg;
  cfg.field("eta_a", o.eta_a >= 0.0 ? o.eta_a : o.eta)
      .field("eta_b", o.eta_b >= 0.0 ? o.eta_b : o.eta)
      .field("e_d", o.e_d)
      .field("n", o.n)
      .field("eps_f", o.eps_f)
      .field("eps_sound", o.eps_sound)
      .field("eps_complete", o.eps_c)
      .field("f_ec", o.f_ec);
  return cfg;
}

// ---------------------------------------------------------------------------
// statistics files

std::string stats_to_csv(const BellStatistics& st, const std::string& cfg_echo_cells,
                         const std::string& cfg_echo_header) {
  std::string out =
      "n,m00,q00,m01,q01,m10,q10,m11,q11,m,q" + cfg_echo_header + "\n";
  out += format_number(st.n);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      out += "," + format_number(st.mxy(x, y)) + "," + format_number(st.qxy(x, y));
    }
  }
  out += "," + format_number(st.m) + "," + format_number(st.q);
  out += cfg_echo_cells;
  out += "\n";
  return out;
}

std::string stats_to_json(const BellStatistics& st, const JsonWriter& cfg) {
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  w.field("n", st.n);
  JsonWriter counts;
  counts.field("m00", st.mxy(0, 0)).field("q00", st.qxy(0, 0));
  counts.field("m01", st.mxy(0, 1)).field("q01", st.qxy(0, 1));
  counts.field("m10", st.mxy(1, 0)).field("q10", st.qxy(1, 0));
  counts.field("m11", st.mxy(1, 1)).field("q11", st.qxy(1, 1));
  counts.field("m", st.m).field("q", st.q);
  w.object("counts", counts);
  w.object("config", cfg);
  return w.str() + "\n";
}

BellStatistics stats_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open statistics file: " + path);
  std::string first;
  std::getline(in, first);
  BellStatistics st;
  const auto grab = [](const std::string& text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\":");
    if (pos == std::string::npos) throw std::runtime_error("statistics file missing field " + key);
    return std::strtod(text.c_str() + pos + key.size() + 3, nullptr);
  };
  if (!first.empty() && first[0] == '{') {
    std::string text = first;
    for (std::string line; std::getline(in, line);) text += line;
    st.n = grab(text, "n");
    st.mxy(0, 0) = grab(text, "m00"); st.qxy(0, 0) = grab(text, "q00");
    st.mxy(0, 1) = grab(text, "m01"); st.qxy(0, 1) = grab(text, "q01");
    st.mxy(1, 0) = grab(text, "m10"); st.qxy(1, 0) = grab(text, "q10");
    st.mxy(1, 1) = grab(text, "m11"); st.qxy(1, 1) = grab(text, "q11");
    st.m = grab(text, "m"); st.q = grab(text, "q");
    return st;
  }
  // CSV: header row then one data row; statistics columns lead.
  std::string data;
  std::getline(in, data);
  std::vector<std::string> header_cells, data_cells;
  for (std::stringstream ss(first); ss.good();) {
    std::string cell;
    std::getline(ss, cell, ',');
    header_cells.push_back(cell);
  }
  for (std::stringstream ss(data); ss.good();) {
    std::string cell;
    std::getline(ss, cell, ',');
    data_cells.push_back(cell);
  }
  if (data_cells.size() < 11) throw std::runtime_error("statistics CSV: missing columns");
  std::map<std::string, double> by_name;
  for (std::size_t i = 0; i < header_cells.size() && i < data_cells.size(); ++i) {
    by_name[header_cells[i]] = std::strtod(data_cells[i].c_str(), nullptr);
  }
  st.n = by_name.at("n");
  st.mxy(0, 0) = by_name.at("m00"); st.qxy(0, 0) = by_name.at("q00");
  st.mxy(0, 1) = by_name.at("m01"); st.qxy(0, 1) = by_name.at("q01");
  st.mxy(1, 0) = by_name.at("m10"); st.qxy(1, 0) = by_name.at("q10");
  st.mxy(1, 1) = by_name.at("m11"); st.qxy(1, 1) = by_name.at("q11");
  st.m = by_name.at("m"); st.q = by_name.at("q");
  return st;
}

// ---------------------------------------------------------------------------
// keyrate

struct KeyrateOpts {
  CommonOpts common;
  double s_bar = -1.0;
  double e_b = -1.0;
  double gamma = -1.0;
  double xi = -1.0;
  bool spot_check = false;
  bool expected = false;  // disable the worst-case deviation model
  bool summary = false;
  std::string stats_file;
};

int run_keyrate(const KeyrateOpts& o) {
  SearchSpec spec;
  spec.method = o.spot_check ? Method::ComplementaritySpotcheck : Method::ComplementarityStandard;
  spec.base_model = o.common.model();
  spec.eps_f = o.common.eps_f;
  spec.eps_complete = o.common.eps_c;
  spec.f_ec = o.common.f_ec;
  if (o.s_bar >= 0.0) {
    if (o.e_b < 0.0) throw CLI::ValidationError("keyrate", "--s-bar requires --e-b");
    spec.use_direct_observation = true;
    spec.s_bar_direct = o.s_bar;
    spec.e_b_direct = o.e_b;
  }
  const SecurityBudget budget = SecurityBudget::thirds(spec.eps_f);
  const double n = o.common.n;
  if (n < 1.0) throw CLI::ValidationError("keyrate", "--n must be at least 1");

  KeyReport report;
  double gamma_used, xi_used;
  const auto evaluate = [&](double g, double xiv) {
    const InputDistribution inputs = o.spot_check ? InputDistribution::spot_checking(g)
                                                  : InputDistribution::standard_family(g);
    BellStatistics stats;
    if (!o.stats_file.empty()) {
      stats = stats_from_file(o.stats_file);
    } else if (spec.use_direct_observation) {
      stats = statistics_from_observation(o.s_bar, o.e_b, n, inputs);
    } else if (o.expected) {
      stats = expected_statistics(spec.base_model, inputs, n);
    } else {
      stats = worst_case_statistics(spec.base_model, inputs, n, FailureProb(spec.eps_complete));
    }
    const Regularization xi(xiv);
    const KatoPlan plan =
        plan_kato(static_cast<std::int64_t>(std::llround(stats.n)), inputs, budget, stats, xi);
    return key_length(stats, inputs, budget, xi, plan, spec.f_ec);
  };

  if (o.gamma > 0.0 && o.xi > 0.0) {
    gamma_used = o.gamma;
    xi_used = o.xi;
    report = evaluate(o.gamma, o.xi);
  } else if (o.gamma > 0.0) {
    gamma_used = o.gamma;
    const double lx = golden_max(
        [&](double l) { return evaluate(o.gamma, std::pow(10.0, l)).key_balance; }, -12.0,
        std::log10(0.49), 1e-4);
    xi_used = std::pow(10.0, lx);
    report = evaluate(o.gamma, xi_used);
  } else {
    spec.n = n;
    const PointEval ev = best_complementarity_balance(spec, n);
    gamma_used = ev.gamma;
    xi_used = o.xi > 0.0 ? o.xi : ev.xi;
    report = evaluate(gamma_used, xi_used);
  }

  JsonWriter cfg = config_echo(o.common);
  cfg.field("mode", o.spot_check ? "spot-checking" : "standard");
  cfg.field("gamma", gamma_used);
  cfg.field("xi", xi_used);
  if (spec.use_direct_observation) {
    cfg.field("s_bar_input", o.s_bar).field("e_b_input", o.e_b);
  }
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  w.field("s_bar", report.s_bar);
  w.field("s_est", report.s_est);
  w.field("xi", report.xi);
  w.field("i_ab", report.i_ab);
  w.field("i_pa", report.i_pa);
  w.field("key_length", report.key_length);
  w.field("key_balance", report.key_balance);
  w.field("eps_total", report.eps_total);
  w.field("abort", report.abort);
  w.object("config", cfg);
  write_text(o.common.output, w.str() + "\n");
  if (o.summary) {
    std::fprintf(stderr, "%s: k = %.6g bits (S_bar = %.6g, S_est = %.6g, xi = %.3g)\n",
                 report.abort ? "ABORT" : "KEY", report.key_balance, report.s_bar,
                 report.s_est, report.xi);
  }
  return report.abort ? kExitAbort : kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  CommonOpts common;
  double gamma = 0.5;
  bool spot_check = false;
  bool worst_case = false;
  std::uint64_t seed = 1;
  std::string format = "csv";
};

int run_simulate(const SimulateOpts& o) {
  if (o.common.n < 1.0) throw CLI::ValidationError("simulate", "--n must be at least 1");
  const InputDistribution inputs = o.spot_check ? InputDistribution::spot_checking(o.gamma)
                                                : InputDistribution::standard_family(o.gamma);
  const ChannelModel model = o.common.model();
  BellStatistics st;
  if (o.worst_case) {
    st = worst_case_statistics(model, inputs, o.common.n, FailureProb(o.common.eps_c));
  } else {
    st = sample_rounds(model, inputs, static_cast<std::int64_t>(std::llround(o.common.n)),
                       o.seed);
  }
  JsonWriter cfg = config_echo(o.common);
  cfg.field("gamma", o.gamma)
      .field("mode", o.spot_check ? "spot-checking" : "standard")
      .field("worst_case", o.worst_case)
      .field("seed", static_cast<long long>(o.seed));
  if (o.format == "json") {
    write_text(o.common.output, stats_to_json(st, cfg));
  } else {
    const std::string hdr = ",eta_a,eta_b,e_d,gamma,spot_check,worst_case,seed";
    std::string cells = "," + format_number(model.eta_a) + "," + format_number(model.eta_b) +
                        "," + format_number(model.e_d) + "," + format_number(o.gamma) + "," +
                        (o.spot_check ? "1" : "0") + "," + (o.worst_case ? "1" : "0") + "," +
                        std::to_string(o.seed);
    write_text(o.common.output, stats_to_csv(st, cells, hdr));
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// searches

SearchSpec make_spec(const CommonOpts& o, Method method) {
  SearchSpec spec;
  spec.method = method;
  spec.base_model = method == Method::DistillBStep
                        ? ChannelModel::bstep_config(o.eta, o.e_d)
                        : o.model();
  spec.n = o.n;
  spec.eps_f = o.eps_f;
  spec.eps_sound = o.eps_sound;
  spec.eps_complete = o.eps_c;
  spec.f_ec = o.f_ec;
  spec.bstep_steps = o.bsteps;
  return spec;
}

struct SweepOpts {
  CommonOpts common;
  std::string method = "com-standard";
  std::string axis = "e-d";
  std::string quantity = "key";  // key | rate | min-rounds
  double from = 0.0, to = 0.15;
  int points = 16;
  bool asymptotic = false;
};

int run_sweep(const SweepOpts& o) {
  const Method method = parse_method(o.method);
  std::string out = "axis,value,gamma,xi,key_balance,min_rounds\n";
  for (int i = 0; i < o.points; ++i) {
    const double v = o.points == 1 ? o.from : o.from + (o.to - o.from) * i / (o.points - 1.0);
    SearchSpec spec = make_spec(o.common, method);
    spec.asymptotic = o.asymptotic;
    spec.axis = o.axis == "eta" ? SweepAxis::Eta : (o.axis == "n" ? SweepAxis::Rounds : SweepAxis::Ed);
    double gamma = 0.0, xi = 0.0, balance = 0.0, minn = 0.0;
    ChannelModel m = spec.axis == SweepAxis::Rounds ? spec.base_model : model_at(spec, v);
    if (method == Method::DistillBStep && spec.axis != SweepAxis::Rounds) {
      m = ChannelModel::bstep_config(spec.axis == SweepAxis::Eta ? v : o.common.eta,
                                     spec.axis == SweepAxis::Ed ? v : o.common.e_d);
    }
    spec.base_model = m;
    const double n_point = spec.axis == SweepAxis::Rounds ? v : spec.n;
    try {
      if (o.quantity == "min-rounds") {
        minn = min_rounds(spec);
      } else if (is_distill(method) || o.asymptotic) {
        balance = evaluate_point(spec, m, n_point);
      } else {
        const PointEval ev = best_complementarity_balance(spec, n_point);
        gamma = ev.gamma;
        xi = ev.xi;
        balance = ev.key_balance;
        if (method == Method::EatOriginal || method == Method::EatModified) {
          const PointEval ee = best_eat_balance(spec, n_point);
          gamma = ee.gamma;
          xi = 0.0;
          balance = ee.key_balance;
        }
      }
    } catch (const std::exception&) {
      out += o.axis + "," + format_number(v) + ",,,,inf\n";  // infeasible point
      continue;
    }
    out += o.axis + "," + format_number(v) + "," + format_number(gamma) + "," +
           format_number(xi) + "," + format_number(balance) + "," +
           (o.quantity == "min-rounds" ? format_number(minn) : std::string("")) + "\n";
  }
  write_text(o.common.output, out);
  return kExitOk;
}

struct ThresholdOpts {
  CommonOpts common;
  std::string method = "com-standard";
  std::string axis = "e-d";
  bool asymptotic = false;
  double bracket_lo = -1.0, bracket_hi = -1.0;
  double tolerance = 1e-4;
};

int run_threshold(const ThresholdOpts& o) {
  SearchSpec spec = make_spec(o.common, parse_method(o.method));
  spec.axis = o.axis == "eta" ? SweepAxis::Eta : SweepAxis::Ed;
  spec.asymptotic = o.asymptotic || is_distill(spec.method);
  spec.tolerance = o.tolerance;
  spec.bracket_lo = o.bracket_lo >= 0.0 ? o.bracket_lo : (spec.axis == SweepAxis::Eta ? 0.80 : 1e-4);
  spec.bracket_hi = o.bracket_hi >= 0.0 ? o.bracket_hi : (spec.axis == SweepAxis::Eta ? 0.9999 : 0.25);
  const double t = threshold(spec);
  JsonWriter cfg = config_echo(o.common);
  cfg.field("method", o.method).field("axis", o.axis).field("asymptotic", spec.asymptotic);
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  w.field("threshold", t);
  w.field("axis", o.axis);
  w.object("config", cfg);
  write_text(o.common.output, w.str() + "\n");
  return kExitOk;
}

struct MinRoundsOpts {
  CommonOpts common;
  std::string method = "com-standard";
  double s_bar = -1.0;
  double e_b = -1.0;
};

int run_min_rounds(const MinRoundsOpts& o) {
  SearchSpec spec = make_spec(o.common, parse_method(o.method));
  if (o.s_bar >= 0.0) {
    spec.use_direct_observation = true;
    spec.s_bar_direct = o.s_bar;
    spec.e_b_direct = o.e_b;
  }
  const double n = min_rounds(spec);
  JsonWriter cfg = config_echo(o.common);
  cfg.field("method", o.method);
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  w.field("min_rounds", n);
  w.object("config", cfg);
  write_text(o.common.output, w.str() + "\n");
  return kExitOk;
}

struct OptimalXiOpts {
  CommonOpts common;
  double gamma = 0.5;
  bool spot_check = false;
};

int run_optimal_xi(const OptimalXiOpts& o) {
  SearchSpec spec = make_spec(o.common, o.spot_check ? Method::ComplementaritySpotcheck
                                                     : Method::ComplementarityStandard);
  const auto balance = [&](double xi) {
    SearchSpec s = spec;
    const bool spot = o.spot_check;
    const InputDistribution inputs = spot ? InputDistribution::spot_checking(o.gamma)
                                          : InputDistribution::standard_family(o.gamma);
    const SecurityBudget budget = SecurityBudget::thirds(s.eps_f);
    const BellStatistics stats =
        worst_case_statistics(s.base_model, inputs, o.common.n, FailureProb(s.eps_complete));
    const Regularization reg(xi);
    const KatoPlan plan = plan_kato(static_cast<std::int64_t>(std::llround(o.common.n)), inputs,
                                    budget, stats, reg);
    return key_length(stats, inputs, budget, reg, plan, s.f_ec).key_balance;
  };
  const OptimalXi r = optimal_xi(balance);
  JsonWriter cfg = config_echo(o.common);
  cfg.field("gamma", o.gamma).field("mode", o.spot_check ? "spot-checking" : "standard");
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  w.field("optimal_xi", r.xi.value());
  w.field("key_balance", r.key_balance);
  w.field("degenerate", r.degenerate);
  w.object("config", cfg);
  write_text(o.common.output, w.str() + "\n");
  return r.key_balance > 0.0 ? kExitOk : kExitAbort;
}

int run_compare_eat(const CommonOpts& common) {
  std::string out = "method,min_rounds\n";
  for (const auto& [name, method] :
       std::vector<std::pair<std::string, Method>>{{"com-standard", Method::ComplementarityStandard},
                                                   {"com-spotcheck", Method::ComplementaritySpotcheck},
                                                   {"eat-modified", Method::EatModified},
                                                   {"eat-original", Method::EatOriginal}}) {
    SearchSpec spec = make_spec(common, method);
    std::string cell;
    try {
      cell = format_number(min_rounds(spec));
    } catch (const std::exception&) {
      cell = "inf";
    }
    out += name + "," + cell + "\n";
  }
  write_text(common.output, out);
  return kExitOk;
}

int run_reanalyze_ion(CommonOpts common, bool have_n) {
  // Reported ion-trap experiment values: S_bar = 2.64, e_b = 1.8%,
  // f_ec = 1.09, eps_f ~ (1e-10)^2/2.
  common.f_ec = 1.09;
  common.eps_f = 5e-21;
  SearchSpec spec = make_spec(common, Method::ComplementarityStandard);
  spec.use_direct_observation = true;
  spec.s_bar_direct = 2.64;
  spec.e_b_direct = 0.018;
  JsonWriter cfg = config_echo(common);
  cfg.field("s_bar_input", 2.64).field("e_b_input", 0.018);
  JsonWriter w;
  w.field("schema_version", static_cast<long long>(kReportSchemaVersion));
  if (have_n) {
    const PointEval ev = best_complementarity_balance(spec, common.n);
    w.field("n", common.n);
    w.field("key_balance", ev.key_balance);
    w.field("gamma", ev.gamma);
    w.field("xi", ev.xi);
    w.object("config", cfg);
    write_text(common.output, w.str() + "\n");
    return ev.key_balance > 0.0 ? kExitOk : kExitAbort;
  }
  const double n = min_rounds(spec);
  w.field("min_rounds", n);
  w.object("config", cfg);
  write_text(common.output, w.str() + "\n");
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_channel = true) {
  if (with_channel) add_channel_opts(cmd, o);
  cmd->add_option("--n", o.n, "number of rounds");
  cmd->add_option("--eps-f", o.eps_f, "total failure probability (complementarity)");
  cmd->add_option("--eps-sound", o.eps_sound, "EAT soundness error");
  cmd->add_option("--eps-c", o.eps_c, "completeness error for the deviation model");
  cmd->add_option("--f-ec", o.f_ec, "information reconciliation efficiency");
  cmd->add_option("--b-steps", o.bsteps, "number of B-steps")->check(CLI::Range(0, 5));
  cmd->add_option("-o,--output", o.output, "output path ('-' = stdout; relative paths resolve under DIQKD_OUTPUT_DIR)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-size DIQKD key-rate analysis"};
  app.set_config("--config", "", "INI config file; section per subcommand");
  app.require_subcommand(1);

  KeyrateOpts key;
  auto* c_key = app.add_subcommand("keyrate", "key length from statistics or a channel model");
  add_common(c_key, key.common);
  c_key->add_option("--s-bar", key.s_bar, "observed Bell value (direct mode)");
  c_key->add_option("--e-b", key.e_b, "observed bit error rate (direct mode)");
  c_key->add_option("--gamma", key.gamma, "test-round ratio (optimized when omitted)");
  c_key->add_option("--xi", key.xi, "regularization parameter (optimized when omitted)");
  c_key->add_flag("--spot-check", key.spot_check, "spot-checking protocol");
  c_key->add_flag("--expected", key.expected, "use expected statistics, no deviation model");
  c_key->add_flag("--summary", key.summary, "print a one-line summary to stderr");
  c_key->add_option("--stats-file", key.stats_file, "statistics file from `simulate`");

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "sample or derive experiment statistics");
  add_common(c_sim, sim.common);
  c_sim->add_option("--gamma", sim.gamma, "test-round ratio");
  c_sim->add_flag("--spot-check", sim.spot_check, "spot-checking inputs");
  c_sim->add_flag("--worst-case", sim.worst_case, "deterministic pessimistic statistics");
  c_sim->add_option("--seed", sim.seed, "RNG seed (Monte Carlo mode)");
  c_sim->add_option("--format", sim.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  SweepOpts swp;
  auto* c_swp = app.add_subcommand("sweep", "tabulate key length / rate / min-rounds along an axis");
  add_common(c_swp, swp.common);
  c_swp->add_option("--method", swp.method, kMethodNames);
  c_swp->add_option("--axis", swp.axis, "eta, e-d or n")->check(CLI::IsMember({"eta", "e-d", "n"}));
  c_swp->add_option("--quantity", swp.quantity, "key, rate or min-rounds")
      ->check(CLI::IsMember({"key", "rate", "min-rounds"}));
  c_swp->add_option("--from", swp.from, "axis start");
  c_swp->add_option("--to", swp.to, "axis end");
  c_swp->add_option("--points", swp.points, "grid points")->check(CLI::PositiveNumber);
  c_swp->add_flag("--asymptotic", swp.asymptotic, "asymptotic rates");

  ThresholdOpts thr;
  auto* c_thr = app.add_subcommand("threshold", "feasibility boundary along eta or e-d");
  add_common(c_thr, thr.common);
  c_thr->add_option("--method", thr.method, kMethodNames);
  c_thr->add_option("--axis", thr.axis, "eta or e-d")->check(CLI::IsMember({"eta", "e-d"}));
  c_thr->add_flag("--asymptotic", thr.asymptotic, "asymptotic limit");
  c_thr->add_option("--bracket-lo", thr.bracket_lo, "bracket lower end");
  c_thr->add_option("--bracket-hi", thr.bracket_hi, "bracket upper end");
  c_thr->add_option("--tolerance", thr.tolerance, "absolute tolerance");

  MinRoundsOpts mnr;
  auto* c_mnr = app.add_subcommand("min-rounds", "smallest data size with positive key");
  add_common(c_mnr, mnr.common);
  c_mnr->add_option("--method", mnr.method, kMethodNames);
  c_mnr->add_option("--s-bar", mnr.s_bar, "observed Bell value (direct mode)");
  c_mnr->add_option("--e-b", mnr.e_b, "observed bit error rate (direct mode)");

  OptimalXiOpts oxi;
  auto* c_oxi = app.add_subcommand("optimal-xi", "best regularization parameter at a point");
  add_common(c_oxi, oxi.common);
  c_oxi->add_option("--gamma", oxi.gamma, "test-round ratio");
  c_oxi->add_flag("--spot-check", oxi.spot_check, "spot-checking protocol");

  CommonOpts cmp;
  auto* c_cmp = app.add_subcommand("compare-eat", "min-rounds for all four finite-size methods");
  add_common(c_cmp, cmp);

  CommonOpts ion;
  auto* c_ion = app.add_subcommand("reanalyze-ion", "re-analysis of the reported ion-trap data");
  add_common(c_ion, ion, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (c_key->parsed()) return run_keyrate(key);
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_swp->parsed()) return run_sweep(swp);
    if (c_thr->parsed()) return run_threshold(thr);
    if (c_mnr->parsed()) return run_min_rounds(mnr);
    if (c_oxi->parsed()) return run_optimal_xi(oxi);
    if (c_cmp->parsed()) return run_compare_eat(cmp);
    if (c_ion->parsed()) return run_reanalyze_ion(ion, c_ion->count("--n") > 0);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
