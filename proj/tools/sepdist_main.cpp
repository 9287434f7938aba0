// Command-line front end: runs each experiment, writes machine-readable
// traces (JSON or CSV), and prints human-readable verdict summaries to
// stderr. Identical configurations produce byte-identical output files.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sepdist/channels.hpp"
#include "sepdist/contmodel.hpp"
#include "sepdist/matcore.hpp"
#include "sepdist/protocol.hpp"
#include "sepdist/qstate.hpp"
#include "sepdist/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace sepdist;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<double> parse_grid(const std::string& text) {
  const auto first = text.find(':');
  if (first == std::string::npos) {
    try {
      return {std::stod(text)};
    } catch (const std::exception&) {
      throw UsageError("bad grid value '" + text + "'");
    }
  }
  const auto second = text.find(':', first + 1);
  if (second == std::string::npos) {
    throw UsageError("grid must be start:stop:count, got '" + text + "'");
  }
  double start = 0.0, stop = 0.0;
  long count = 0;
  try {
    start = std::stod(text.substr(0, first));
    stop = std::stod(text.substr(first + 1, second - first - 1));
    count = std::stol(text.substr(second + 1));
  } catch (const std::exception&) {
    throw UsageError("bad grid '" + text + "'");
  }
  if (count < 1) throw UsageError("grid count must be >= 1");
  std::vector<double> grid;
  grid.reserve(count);
  for (long i = 0; i < count; ++i) {
    grid.push_back(count == 1 ? start : start + (stop - start) * i / double(count - 1));
  }
  return grid;
}

double resolve_t_max(const std::string& text, double epsilon) {
  if (text == "auto") return 2.0 * std::numbers::pi / (epsilon * epsilon);
  try {
    const double t = std::stod(text);
    if (t < 0.0) throw UsageError("t-max must be >= 0");
    return t;
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("bad t-max '" + text + "' (number or 'auto')");
  }
}

void write_output(const std::string& out_path, const std::string& payload) {
  if (out_path.empty() || out_path == "-") {
    std::cout << payload;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error("cannot open output file: " + out_path);
  file << payload;
}

std::string csv_header(const json& config) {
  std::ostringstream out;
  out << "# sepdist " << kVersion << "\n";
  for (const auto& [key, value] : config.items()) {
    out << "# " << key << "=";
    if (value.is_number_float()) {
      out << fmt17(value.get<double>());
    } else if (value.is_string()) {
      out << value.get<std::string>();
    } else {
      out << value.dump();
    }
    out << "\n";
  }
  return out.str();
}

std::string dump_json(json j) {
  j["version"] = kVersion;
  return j.dump(2) + "\n";
}

const char* verdict_name(channels::AuditVerdict v) {
  return v == channels::AuditVerdict::no_violation_found ? "no-violation-found"
                                                         : "entangling-witness-found";
}

// ---------------------------------------------------------------------------

int cmd_discrete(const std::string& format, const std::string& out_path) {
  const protocol::ProtocolTrace trace = protocol::run_protocol();
  const protocol::MeasurementResult measured = protocol::measure_ancilla(trace.tau);

  json config{{"command", "discrete"}, {"format", format}};
  if (format == "json") {
    json steps;
    auto step = [](const protocol::StepNegativities& n) {
      return json{{"neg_a_bc", n.a_bc}, {"neg_b_ac", n.b_ac}, {"neg_c_ab", n.c_ab}};
    };
    steps["initial"] = step(trace.neg_initial);
    steps["sigma"] = step(trace.neg_sigma);
    steps["tau"] = step(trace.neg_tau);
    json branches = json::array();
    for (const auto& b : measured.branches) {
      branches.push_back({{"outcome", b.outcome}, {"probability", b.probability}});
    }
    json out{{"config", config},
             {"steps", steps},
             {"sigma_vs_reference", trace.sigma_vs_reference},
             {"tau_vs_reference", trace.tau_vs_reference},
             {"prob_outcome_0", trace.prob_outcome0},
             {"branches", branches},
             {"extraction_negativity", trace.neg_rho_ab}};
    write_output(out_path, dump_json(out));
  } else {
    std::ostringstream csv;
    csv << csv_header(config);
    csv << "# prob_outcome_0=" << fmt17(trace.prob_outcome0) << "\n";
    csv << "# extraction_negativity=" << fmt17(trace.neg_rho_ab) << "\n";
    csv << "step,neg_a_bc,neg_b_ac,neg_c_ab\n";
    auto row = [&](const char* name, const protocol::StepNegativities& n) {
      csv << name << "," << fmt17(n.a_bc) << "," << fmt17(n.b_ac) << "," << fmt17(n.c_ab)
          << "\n";
    };
    row("initial", trace.neg_initial);
    row("sigma", trace.neg_sigma);
    row("tau", trace.neg_tau);
    write_output(out_path, csv.str());
  }
  const qstate::Bipartition cut_c = qstate::Bipartition::of({2}, 3);
  std::cerr << "discrete: extraction negativity " << trace.neg_rho_ab
            << "; c|(ab) after step 2: " << qstate::separability_label(trace.sigma, cut_c)
            << "; after step 3: " << qstate::separability_label(trace.tau, cut_c) << "\n";
  return 0;
}

int cmd_continuous(double epsilon, double alpha, const std::string& t_max_text, int steps,
                   const std::string& mode_name, int n_trotter, const std::string& format,
                   const std::string& out_path) {
  const double t_max = resolve_t_max(t_max_text, epsilon);
  contmodel::EvolveMode mode = contmodel::EvolveMode::exact();
  if (mode_name == "effective") {
    mode = contmodel::EvolveMode::effective();
  } else if (mode_name == "trotter") {
    mode = contmodel::EvolveMode::trotter(n_trotter);
  } else if (mode_name != "exact") {
    throw UsageError("mode must be exact, effective or trotter");
  }

  const contmodel::EvolutionTrace trace =
      contmodel::run_trace(epsilon, alpha, t_max, steps, mode);

  json config{{"command", "continuous"}, {"epsilon", epsilon}, {"alpha", alpha},
              {"t_max", t_max},          {"steps", steps},     {"mode", mode_name},
              {"format", format}};
  if (mode_name == "trotter") config["n_trotter"] = n_trotter;

  if (format == "csv") {
    std::ostringstream csv;
    csv << csv_header(config);
    csv << "time,neg_c_ab,neg_a_bc,neg_b_ac,neg_ab\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      csv << fmt17(trace.times[i]) << "," << fmt17(trace.neg_c_ab[i]) << ","
          << fmt17(trace.neg_a_bc[i]) << "," << fmt17(trace.neg_b_ac[i]) << ","
          << fmt17(trace.neg_ab_reduced[i]) << "\n";
    }
    write_output(out_path, csv.str());
  } else {
    json out{{"config", config},
             {"times", trace.times},
             {"neg_c_ab", trace.neg_c_ab},
             {"neg_a_bc", trace.neg_a_bc},
             {"neg_b_ac", trace.neg_b_ac},
             {"neg_ab", trace.neg_ab_reduced},
             {"max_neg_c_ab", trace.max_neg_c_ab()},
             {"max_neg_ab", trace.max_neg_ab_reduced()},
             {"min_pt_eig_c_ab", trace.min_pt_eig_c_ab}};
    write_output(out_path, dump_json(out));
  }
  const qstate::DensityMatrix final_state =
      contmodel::evolve(contmodel::initial_state(alpha), epsilon, t_max, mode);
  std::cerr << "continuous: max mediator negativity " << trace.max_neg_c_ab()
            << ", max reduced-ab negativity " << trace.max_neg_ab_reduced()
            << "; c|(ab) at t_max: "
            << qstate::separability_label(final_state, qstate::Bipartition::of({2}, 3))
            << "\n";
  return 0;
}

int cmd_sweep(const std::string& eps_text, const std::string& alpha_text, double t_max_factor,
              int steps, const std::string& format, const std::string& out_path) {
  const std::vector<double> eps_grid = parse_grid(eps_text);
  const std::vector<double> alpha_grid = parse_grid(alpha_text);
  const contmodel::FeasibilityTable table =
      contmodel::sweep(eps_grid, alpha_grid, t_max_factor, steps);

  json config{{"command", "sweep"},
              {"epsilon", eps_text},
              {"alpha", alpha_text},
              {"t_max_factor", t_max_factor},
              {"steps", steps},
              {"format", format}};

  int n_feasible = 0;
  for (const auto& row : table.rows) n_feasible += row.sim_feasible ? 1 : 0;

  if (format == "csv") {
    std::ostringstream csv;
    csv << csv_header(config);
    csv << "epsilon,alpha,max_neg_c_ab,max_neg_ab,min_pt_eig_c_ab,"
           "ancilla_separable_all_t,ab_entangled,sim_feasible,analytic_budget,"
           "analytic_feasible\n";
    for (const auto& row : table.rows) {
      csv << fmt17(row.epsilon) << "," << fmt17(row.alpha) << "," << fmt17(row.max_neg_c_ab)
          << "," << fmt17(row.max_neg_ab) << "," << fmt17(row.min_pt_eig_c_ab) << ","
          << (row.ancilla_separable_all_t ? 1 : 0) << "," << (row.ab_entangled ? 1 : 0) << ","
          << (row.sim_feasible ? 1 : 0) << "," << fmt17(row.analytic_budget) << ","
          << (row.analytic_feasible ? 1 : 0) << "\n";
    }
    write_output(out_path, csv.str());
  } else {
    json rows = json::array();
    for (const auto& row : table.rows) {
      rows.push_back({{"epsilon", row.epsilon},
                      {"alpha", row.alpha},
                      {"max_neg_c_ab", row.max_neg_c_ab},
                      {"max_neg_ab", row.max_neg_ab},
                      {"min_pt_eig_c_ab", row.min_pt_eig_c_ab},
                      {"ancilla_separable_all_t", row.ancilla_separable_all_t},
                      {"ab_entangled", row.ab_entangled},
                      {"sim_feasible", row.sim_feasible},
                      {"analytic_budget", row.analytic_budget},
                      {"analytic_feasible", row.analytic_feasible}});
    }
    write_output(out_path, dump_json(json{{"config", config}, {"rows", rows}}));
  }
  std::cerr << "sweep: " << n_feasible << " of " << table.rows.size()
            << " grid points feasible by simulation\n";
  return 0;
}

int cmd_trotter(double epsilon, double alpha, const std::string& t_max_text, int n_trotter,
                const std::string& format, const std::string& out_path) {
  const double t_max = resolve_t_max(t_max_text, epsilon);
  const CMat u_exact =
      contmodel::evolution_operator(epsilon, t_max, contmodel::EvolveMode::exact());
  json convergence = json::array();
  for (int n : {n_trotter, 2 * n_trotter, 4 * n_trotter}) {
    const CMat u_n =
        contmodel::evolution_operator(epsilon, t_max, contmodel::EvolveMode::trotter(n));
    convergence.push_back(
        {{"n", n},
         {"distance", matcore::norm(u_exact - u_n, matcore::NormKind::spectral)}});
  }
  const contmodel::BounceTrace bounce =
      contmodel::bounce_simulation(epsilon, alpha, t_max, n_trotter);

  json config{{"command", "trotter"}, {"epsilon", epsilon},     {"alpha", alpha},
              {"t_max", t_max},       {"n_trotter", n_trotter}, {"format", format}};

  if (format == "csv") {
    std::ostringstream csv;
    csv << csv_header(config);
    for (const auto& c : convergence) {
      csv << "# distance_n" << c["n"] << "=" << fmt17(c["distance"].get<double>()) << "\n";
    }
    csv << "# max_neg_c_ab=" << fmt17(bounce.max_neg_c_ab) << "\n";
    csv << "# max_neg_ab=" << fmt17(bounce.max_neg_ab) << "\n";
    csv << "half_step,time,neg_c_ab\n";
    for (std::size_t i = 0; i < bounce.times.size(); ++i) {
      csv << i + 1 << "," << fmt17(bounce.times[i]) << "," << fmt17(bounce.neg_c_ab[i])
          << "\n";
    }
    write_output(out_path, csv.str());
  } else {
    json out{{"config", config},
             {"convergence", convergence},
             {"bounce",
              {{"times", bounce.times},
               {"neg_c_ab", bounce.neg_c_ab},
               {"neg_ab", bounce.neg_ab},
               {"max_neg_c_ab", bounce.max_neg_c_ab},
               {"max_neg_ab", bounce.max_neg_ab}}}};
    write_output(out_path, dump_json(out));
  }
  std::cerr << "trotter: bounce max mediator negativity " << bounce.max_neg_c_ab
            << ", final-step reduced-ab negativity max " << bounce.max_neg_ab << "\n";
  return 0;
}

int cmd_channels(int samples, std::uint64_t seed, const std::string& format,
                 const std::string& out_path) {
  const channels::KrausMap e1 = channels::stage_one_map();
  const channels::KrausMap e2 = channels::stage_two_map();
  const channels::KrausMap composed = channels::compose(e2, e1);
  const channels::KrausMap direct = channels::composed_map();
  const double choi_distance =
      (channels::choi(composed).mat - channels::choi(direct).mat).cwiseAbs().maxCoeff();

  struct AuditSpec {
    const char* map_name;
    const channels::KrausMap* map;
    std::vector<int> left;
    const char* cut_name;
  };
  const std::vector<AuditSpec> audits{
      {"stage_one", &e1, {1}, "b|(ac)"},   {"stage_one", &e1, {2}, "c|(ab)"},
      {"stage_two", &e2, {0}, "a|(bc)"},   {"stage_two", &e2, {2}, "c|(ab)"},
      {"composed", &composed, {2}, "c|(ab)"}, {"composed", &composed, {0}, "a|(bc)"},
      {"composed", &composed, {1}, "b|(ac)"}};

  json audit_rows = json::array();
  std::uint64_t audit_seed = seed;
  for (const auto& spec : audits) {
    const channels::AuditReport report = channels::audit_nonentangling(
        *spec.map, qstate::Bipartition::of(spec.left, 3), samples, audit_seed++);
    audit_rows.push_back({{"map", spec.map_name},
                          {"cut", spec.cut_name},
                          {"samples", report.samples},
                          {"max_output_negativity", report.max_output_negativity},
                          {"verdict", verdict_name(report.verdict)}});
  }

  const channels::EntangleDemo demo = channels::demo_entangle_plus();

  json config{{"command", "channels"}, {"samples", samples}, {"seed", seed},
              {"format", format}};
  json out{{"config", config},
           {"stage_one_trace_preserving", channels::is_trace_preserving(e1)},
           {"stage_two_trace_preserving", channels::is_trace_preserving(e2)},
           {"composition_choi_distance", choi_distance},
           {"audits", audit_rows},
           {"demo",
            {{"prob_plus", demo.prob_plus},
             {"prob_minus", demo.prob_minus},
             {"negativity_plus", demo.negativity_plus},
             {"negativity_minus", demo.negativity_minus}}}};
  write_output(out_path, dump_json(out));
  std::cerr << "channels: composition Choi distance " << choi_distance << "; demo (+) branch negativity "
            << demo.negativity_plus << "\n";
  return 0;
}

int cmd_nogo(int samples, std::uint64_t seed, const std::string& out_path) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto random_hermitian = [&](int dim) {
    CMat m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return CMat(0.5 * (m + m.adjoint()));
  };
  auto orthogonal_to = [&](const CVec& v) {
    CVec w = qstate::haar_random_state(static_cast<int>(v.size()), rng);
    w -= v * v.dot(w);
    return CVec(w / w.norm());
  };

  double max_amp = 0.0;
  for (int s = 0; s < samples; ++s) {
    const CMat h_ac = random_hermitian(6);
    const CMat h_bc = random_hermitian(6);
    const CVec a = qstate::haar_random_state(2, rng);
    const CVec b = qstate::haar_random_state(2, rng);
    const CVec c = qstate::haar_random_state(3, rng);
    const Complex amp = contmodel::pure_firstorder_amplitude(h_ac, h_bc, a, b, c,
                                                             orthogonal_to(a), orthogonal_to(b));
    max_amp = std::max(max_amp, std::abs(amp));
  }
  json out{{"config", {{"command", "nogo"}, {"samples", samples}, {"seed", seed}}},
           {"max_amplitude", max_amp},
           {"vanishes", max_amp <= 1e-12}};
  write_output(out_path, dump_json(out));
  std::cerr << "nogo: max first-order leakage amplitude " << max_amp << " over " << samples
            << " random draws\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement distribution with separable mediators: simulation toolkit"};
  app.require_subcommand(1);

  struct {
    std::string format = "json", out = "-";
  } discrete_opt;
  auto* discrete = app.add_subcommand("discrete", "run the three-qubit send-the-mediator protocol");
  discrete->add_option("--format", discrete_opt.format, "json or csv");
  discrete->add_option("--out", discrete_opt.out, "output path ('-' for stdout)");

  struct {
    double epsilon = 0.1, alpha = 1.0;
    std::string t_max = "auto", mode = "exact", format = "csv", out = "-";
    int steps = 500, n_trotter = 128;
  } cont_opt;
  auto* continuous = app.add_subcommand("continuous", "trace negativities under the continuous model");
  continuous->add_option("--epsilon", cont_opt.epsilon, "coupling strength in (0,1)")->required();
  continuous->add_option("--alpha", cont_opt.alpha, "mixing weight >= 0")->required();
  continuous->add_option("--t-max", cont_opt.t_max, "end time, or 'auto' for 2*pi/eps^2");
  continuous->add_option("--steps", cont_opt.steps, "grid points");
  continuous->add_option("--mode", cont_opt.mode, "exact, effective or trotter");
  continuous->add_option("--n-trotter", cont_opt.n_trotter, "steps for trotter mode");
  continuous->add_option("--format", cont_opt.format, "json or csv");
  continuous->add_option("--out", cont_opt.out, "output path");

  struct {
    std::string epsilon = "0.02:0.2:10", alpha = "0:2:9", format = "csv", out = "-";
    double t_max_factor = 1.0;
    int steps = 501;
  } sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "feasibility table over (epsilon, alpha)");
  sweep->add_option("--epsilon", sweep_opt.epsilon, "grid start:stop:count");
  sweep->add_option("--alpha", sweep_opt.alpha, "grid start:stop:count");
  sweep->add_option("--t-max-factor", sweep_opt.t_max_factor, "window in units of 2*pi/eps^2");
  sweep->add_option("--steps", sweep_opt.steps, "time grid points per run");
  sweep->add_option("--format", sweep_opt.format, "json or csv");
  sweep->add_option("--out", sweep_opt.out, "output path");

  struct {
    double epsilon = 0.1, alpha = 1.0;
    std::string t_max = "auto", format = "json", out = "-";
    int n_trotter = 256;
  } trot_opt;
  auto* trotter = app.add_subcommand("trotter", "trotter convergence and bounce simulation");
  trotter->add_option("--epsilon", trot_opt.epsilon, "coupling strength");
  trotter->add_option("--alpha", trot_opt.alpha, "mixing weight");
  trotter->add_option("--t-max", trot_opt.t_max, "end time, or 'auto'");
  trotter->add_option("--n-trotter", trot_opt.n_trotter, "base step count");
  trotter->add_option("--format", trot_opt.format, "json or csv");
  trotter->add_option("--out", trot_opt.out, "output path");

  struct {
    int samples = 1000;
    std::uint64_t seed = 12345;
    std::string format = "json", out = "-";
  } chan_opt;
  auto* channels_cmd = app.add_subcommand("channels", "two-stage map composition and audits");
  channels_cmd->add_option("--samples", chan_opt.samples, "separable inputs per audit");
  channels_cmd->add_option("--seed", chan_opt.seed, "audit seed");
  channels_cmd->add_option("--format", chan_opt.format, "json");
  channels_cmd->add_option("--out", chan_opt.out, "output path");

  struct {
    int samples = 1000;
    std::uint64_t seed = 12345;
    std::string out = "-";
  } nogo_opt;
  auto* nogo = app.add_subcommand("nogo", "first-order pure-state leakage check");
  nogo->add_option("--samples", nogo_opt.samples, "random draws");
  nogo->add_option("--seed", nogo_opt.seed, "rng seed");
  nogo->add_option("--out", nogo_opt.out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (discrete->parsed()) return cmd_discrete(discrete_opt.format, discrete_opt.out);
    if (continuous->parsed())
      return cmd_continuous(cont_opt.epsilon, cont_opt.alpha, cont_opt.t_max, cont_opt.steps,
                            cont_opt.mode, cont_opt.n_trotter, cont_opt.format, cont_opt.out);
    if (sweep->parsed())
      return cmd_sweep(sweep_opt.epsilon, sweep_opt.alpha, sweep_opt.t_max_factor,
                       sweep_opt.steps, sweep_opt.format, sweep_opt.out);
    if (trotter->parsed())
      return cmd_trotter(trot_opt.epsilon, trot_opt.alpha, trot_opt.t_max, trot_opt.n_trotter,
                         trot_opt.format, trot_opt.out);
    if (channels_cmd->parsed())
      return cmd_channels(chan_opt.samples, chan_opt.seed, chan_opt.format, chan_opt.out);
    if (nogo->parsed()) return cmd_nogo(nogo_opt.samples, nogo_opt.seed, nogo_opt.out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "internal consistency failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
