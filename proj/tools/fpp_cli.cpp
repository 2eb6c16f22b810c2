#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpp/acceptance.hpp"
#include "fpp/errors.hpp"
#include "fpp/fidi.hpp"
#include "fpp/montecarlo.hpp"
#include "fpp/renewal.hpp"
#include "fpp/special_functions.hpp"
#include "table.hpp"

namespace {

using fpp::cli::Cell;
using fpp::cli::Table;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RunConfig {
  std::string command;
  double beta = 0.5;
  double t = 1.0;
  int n1 = 1;
  std::vector<double> times;
  std::vector<int> counts;
  std::int64_t n_paths = -1;  // -1: the command's default
  std::uint64_t seed = 1;
  double tol = 0.0;  // 0: the command's default
  int n_max = -1;
  double y_max = 5.0;
  double bin_u = 0.05;
  double bin_y = 0.01;
  bool quick = false;
  std::string function = "e1";
  int order = 1;
  std::vector<int> only;
  unsigned threads = 0;
  std::string out = "-";
  std::string format = "csv";
};

std::size_t paths_or(const RunConfig& c, std::size_t fallback) {
  return c.n_paths < 0 ? fallback : static_cast<std::size_t>(c.n_paths);
}

Table start_table(const RunConfig& c) {
  Table t;
  t.meta.push_back({"fpp", FPP_VERSION});
  t.meta.push_back({"command", c.command});
  t.meta.push_back({"seed", std::to_string(c.seed)});
  return t;
}

void emit(const RunConfig& c, const Table& t) {
  auto write = [&](std::ostream& os) {
    if (c.format == "json") {
      fpp::cli::write_json(os, t);
    } else {
      fpp::cli::write_csv(os, t);
    }
  };
  if (c.out.empty() || c.out == "-") {
    write(std::cout);
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + c.out + " for writing");
  write(f);
  if (!f) throw std::runtime_error("failed writing " + c.out);
}

int cmd_pmf(const RunConfig& c) {
  const fpp::InterArrivalLaw law{fpp::FractionalOrder(c.beta)};
  if (!(c.t > 0.0) || !std::isfinite(c.t)) throw fpp::DomainError("--t must be positive");
  const double tol = c.tol > 0.0 ? c.tol : 1e-6;
  int n_max = c.n_max;
  if (n_max < 0) {
    n_max = 0;
    while (n_max < 400 && law.epoch_cdf(n_max + 1, c.t) > tol) ++n_max;
  }
  const auto pmf = fpp::counting_pmf(law, c.t, n_max);
  const std::size_t paths = paths_or(c, 100000);

  Table table = start_table(c);
  table.config = {{"beta", c.beta}, {"t", c.t}, {"n_max", n_max}, {"paths", paths},
                  {"seed", c.seed}, {"tol", tol}};
  table.meta.push_back({"analytic_tail_mass", fpp::cli::format_number(pmf.tail_mass)});
  table.columns = {"n", "analytic_p", "mc_p", "mc_stderr"};
  fpp::Histogram h;
  if (paths > 0) {
    fpp::MonteCarloOptions mc;
    mc.seed = c.seed;
    mc.threads = c.threads;
    h = fpp::estimate_counting_pmf(law, c.t, paths, mc);
  }
  for (int n = 0; n <= n_max; ++n) {
    const auto k = static_cast<std::size_t>(n);
    double p = kNaN;
    double se = kNaN;
    if (paths > 0) {
      p = k < h.bins() ? h.probability(k) : 0.0;
      se = std::sqrt(p * (1.0 - p) / static_cast<double>(paths));
    }
    table.rows.push_back({static_cast<long long>(n), pmf.probabilities[k], p, se});
  }
  emit(c, table);
  return 0;
}

int cmd_residual(const RunConfig& c) {
  const fpp::InterArrivalLaw law{fpp::FractionalOrder(c.beta)};
  const double t1 = c.t;
  if (!(t1 > 0.0) || !std::isfinite(t1)) throw fpp::DomainError("--t must be positive");
  if (c.n1 < 0) throw fpp::DomainError("--n1 must be >= 0");
  if (!(c.y_max > 0.0) || !(c.bin_u > 0.0) || !(c.bin_y > 0.0)) {
    throw fpp::DomainError("--ymax and the bin widths must be positive");
  }
  const std::size_t paths = paths_or(c, 1000000);
  const auto kernel = fpp::residual_lifetime_pdf(law, t1, c.n1);
  const double p_n1 = law.counting_probability(c.n1, t1).value;
  auto f_u = [&](double u) {
    if (c.n1 == 0 || u <= 0.0 || u >= t1) return kNaN;
    return law.epoch_pdf(c.n1, u) * law.survival(t1 - u) / p_n1;
  };

  fpp::ConditionalLaws laws;
  if (paths > 0) {
    fpp::ConditionalOptions co;
    co.seed = c.seed;
    co.threads = c.threads;
    co.last_epoch_bin = c.bin_u;
    co.residual_bin = c.bin_y;
    co.residual_max = c.y_max;
    co.keep_samples = false;
    laws = fpp::estimate_conditional_laws(law, t1, c.n1, paths, co);
  }

  Table table = start_table(c);
  table.config = {{"beta", c.beta}, {"t1", t1},        {"n1", c.n1},      {"paths", paths},
                  {"seed", c.seed}, {"bin_u", c.bin_u}, {"bin_y", c.bin_y}, {"ymax", c.y_max}};
  if (paths > 0) table.meta.push_back({"accepted_paths", std::to_string(laws.accepted)});
  table.meta.push_back(
      {"kernel_normalization_defect", fpp::cli::format_number(kernel.normalization_defect())});
  table.columns = {"t", "analytic_fU", "mc_fU", "analytic_fY", "mc_fY"};
  const auto bins = static_cast<std::size_t>(std::ceil(c.y_max / c.bin_y - 1e-9));
  for (std::size_t i = 0; i < bins; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * c.bin_y;
    double mc_u = kNaN;
    double mc_y = kNaN;
    if (paths > 0) {
      const auto j = static_cast<std::size_t>(std::floor(t / c.bin_u));
      if (t < t1 && j < laws.last_epoch.bins()) mc_u = laws.last_epoch.density(j);
      mc_y = laws.residual.density(i);
    }
    table.rows.push_back({t, f_u(t), mc_u, kernel.pdf(t), mc_y});
  }
  emit(c, table);
  return 0;
}

int cmd_fidi(const RunConfig& c) {
  const fpp::InterArrivalLaw law{fpp::FractionalOrder(c.beta)};
  const fpp::ObservationSchedule schedule(c.times, c.counts);
  const std::size_t paths = paths_or(c, 1000000);
  const double tol = c.tol > 0.0 ? c.tol : 1e-9;

  const auto rec = fpp::joint_pmf(schedule, law);
  double oracle = kNaN;
  double oracle_err = kNaN;
  if (schedule.size() <= 3) {
    const auto o = fpp::joint_pmf_oracle(schedule, law, tol);
    oracle = o.value;
    oracle_err = o.est_abs_error;
  }
  double mc = kNaN;
  double mc_se = kNaN;
  if (paths > 0) {
    fpp::MonteCarloOptions opts;
    opts.seed = c.seed;
    opts.threads = c.threads;
    const auto e = fpp::estimate_joint_pmf(law, schedule, paths, opts);
    mc = e.probability;
    mc_se = e.standard_error;
  }

  Table table = start_table(c);
  table.config = {{"beta", c.beta}, {"times", c.times}, {"counts", c.counts},
                  {"paths", paths}, {"seed", c.seed},   {"tol", tol}};
  table.columns = {"joint_pmf", "joint_pmf_err", "oracle",          "oracle_err",
                   "mc_p",      "mc_stderr",     "joint_minus_oracle", "joint_minus_mc",
                   "oracle_minus_mc"};
  table.rows.push_back({rec.value, rec.est_abs_error, oracle, oracle_err, mc, mc_se,
                        rec.value - oracle, rec.value - mc, oracle - mc});
  emit(c, table);
  return 0;
}

// Debugging aid: every method that applies, side by side.
int cmd_ml_eval(const RunConfig& c) {
  const fpp::FractionalOrder beta(c.beta);
  Table table = start_table(c);
  table.config = {{"beta", c.beta}, {"x", c.t}, {"function", c.function}, {"n", c.order}};
  table.columns = {"function", "method", "value", "est_abs_error"};
  auto row = [&](const std::string& name, const fpp::MLEvaluation& e) {
    table.rows.push_back({name, std::string(fpp::to_string(e.method)), e.value, e.est_abs_error});
  };
  if (c.function == "e1") {
    row("E_b(x)", fpp::ml_one_param(beta, c.t));
  } else if (c.function == "e2") {
    row("E_b,b(x)", fpp::ml_two_param(beta, c.t));
  } else {
    row("P_n(t)", fpp::ml_derivative_series(c.order, beta, c.t));
    row("P_n(t)", fpp::ml_derivative_stable(c.order, beta, c.t));
  }
  emit(c, table);
  return 0;
}

int cmd_validate(const RunConfig& c) {
  fpp::AcceptanceOptions opts;
  opts.quick = c.quick;
  opts.only = c.only;
  opts.seed = c.seed;
  opts.threads = c.threads;
  if (c.tol > 0.0) opts.tolerance_override = c.tol;
  const auto results = fpp::run_acceptance(opts, [](const fpp::CriterionResult& r) {
    std::cerr << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << " (" << r.seconds
              << " s): " << r.name << "\n";
  });

  Table table = start_table(c);
  table.config = {{"quick", c.quick}, {"only", c.only}, {"seed", c.seed}, {"tol", c.tol}};
  table.columns = {"id", "name", "passed", "metric", "threshold", "detail"};
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    table.rows.push_back(
        {static_cast<long long>(r.id), r.name, r.passed, r.metric, r.threshold, r.detail});
  }
  emit(c, table);
  return all ? 0 : 1;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "Master seed of the Monte Carlo streams");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores); results do not depend on it");
  sub->add_option("--out", c.out, "Output file, - for standard output");
  sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig c;
  CLI::App app{"Fractional Poisson process: distributions, multi-point laws and simulation"};
  app.set_version_flag("--version", std::string(FPP_VERSION));
  app.require_subcommand(1);
  app.allow_windows_style_options(false);

  auto* pmf = app.add_subcommand("pmf", "P(N(t) = n) against simulation");
  pmf->add_option("--beta", c.beta, "Order in (0, 1]")->required();
  pmf->add_option("--t", c.t, "Observation time")->required();
  pmf->add_option("--nmax", c.n_max, "Largest n (default: until the tail is below --tol)");
  pmf->add_option("--paths", c.n_paths, "Simulated paths, 0 to skip (default 100000)");
  pmf->add_option("--tol", c.tol, "Tail mass that stops the table (default 1e-6)");
  add_common(pmf, c);

  auto* residual = app.add_subcommand("residual", "Densities of U and Y given N(t1) = n1");
  residual->add_option("--beta", c.beta, "Order in (0, 1]")->required();
  residual->add_option("--t", c.t, "Observation time t1")->required();
  residual->add_option("--n1", c.n1, "Observed count")->required();
  residual->add_option("--paths", c.n_paths, "Simulated paths, 0 to skip (default 1000000)");
  residual->add_option("--ymax", c.y_max, "Largest tabulated time");
  residual->add_option("--bin-u", c.bin_u, "Histogram bin width of U");
  residual->add_option("--bin-y", c.bin_y, "Histogram bin width of Y");
  add_common(residual, c);

  auto* fidi = app.add_subcommand("fidi", "Joint law P(N(t_1) = n_1, ..., N(t_k) = n_k)");
  fidi->add_option("--beta", c.beta, "Order in (0, 1]")->required();
  fidi->add_option("--times", c.times, "Observation times, comma separated")
      ->required()
      ->delimiter(',');
  fidi->add_option("--counts", c.counts, "Counts, comma separated")->required()->delimiter(',');
  fidi->add_option("--paths", c.n_paths, "Simulated paths, 0 to skip (default 1000000)");
  fidi->add_option("--tol", c.tol, "Oracle quadrature tolerance (default 1e-9)");
  add_common(fidi, c);

  auto* validate = app.add_subcommand("validate", "Run the acceptance suite");
  validate->add_flag("--quick", c.quick, "Smaller Monte Carlo ensembles");
  validate->add_option("--tol", c.tol, "Replace every criterion threshold");
  validate->add_option("--only", c.only, "Criterion ids to run, comma separated")
      ->delimiter(',')
      ->check(CLI::Range(1, 8));
  add_common(validate, c);

  auto* ml = app.add_subcommand("ml-eval", "Evaluate a Mittag-Leffler quantity");
  ml->group("");  // hidden from --help
  ml->add_option("--beta", c.beta, "Order in (0, 1]")->required();
  ml->add_option("--x", c.t, "Argument x <= 0 of E, or t of P_n(t)")->required();
  ml->add_option("--function", c.function, "e1, e2 or pn")
      ->check(CLI::IsMember({"e1", "e2", "pn"}));
  ml->add_option("--n", c.order, "n of P_n");
  add_common(ml, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (pmf->parsed()) {
      c.command = "pmf";
      return cmd_pmf(c);
    }
    if (residual->parsed()) {
      c.command = "residual";
      return cmd_residual(c);
    }
    if (fidi->parsed()) {
      c.command = "fidi";
      return cmd_fidi(c);
    }
    if (ml->parsed()) {
      c.command = "ml-eval";
      return cmd_ml_eval(c);
    }
    c.command = "validate";
    return cmd_validate(c);
  } catch (const fpp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fpp::InsufficientAcceptance& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const fpp::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const fpp::SupportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
