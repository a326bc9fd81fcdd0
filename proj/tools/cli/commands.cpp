#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <thread>

#include "elastobayes/errors.hpp"
#include "elastobayes/summary.hpp"
#include "io.hpp"

namespace fs = std::filesystem;

namespace elastobayes::cli {
namespace {

fs::path level_dir(const fs::path& root, int n) { return root / ("level_" + std::to_string(n)); }

std::string percent_label(double q) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "E_q%02d", static_cast<int>(std::lround(100.0 * q)));
  return buf;
}

Eigen::VectorXd component(const Eigen::VectorXd& stacked, int c) {
  Eigen::VectorXd out(stacked.size() / kStressComponents);
  for (Eigen::Index e = 0; e < out.size(); ++e) out(e) = stacked(kStressComponents * e + c);
  return out;
}

Eigen::VectorXd log10_of(const Eigen::VectorXd& v) { return v.array().log10().matrix(); }

void write_lambda(const fs::path& file, const Mesh& mesh, const Eigen::VectorXd& lambda2) {
  write_element_table(file, mesh, {"lambda2", "log10_lambda2"}, {lambda2, log10_of(lambda2)});
}

void write_summary(const fs::path& dir, const Mesh& mesh, const PosteriorSummary& s) {
  const std::vector<std::string> names = {
      "E_mean", percent_label(s.q_lo), percent_label(s.q_hi), "lambda2", "log10_lambda2",
      "sxx",    "syy",                 "sxy",                 "pressure", "shear"};
  const std::vector<Eigen::VectorXd> cols = {
      s.E_mean, s.E_lo, s.E_hi, s.lambda2, log10_of(s.lambda2),
      component(s.stress_mean, 0), component(s.stress_mean, 1), component(s.stress_mean, 2),
      s.pressure, s.shear};
  write_element_table(dir / "elements.csv", mesh, names, cols);
  write_node_table(dir / "nodes.csv", mesh, s.u_mean);
  write_transect_table(dir / "diagonal.csv", mesh, main_diagonal(mesh), names, cols);
  write_transect_table(dir / "antidiagonal.csv", mesh, anti_diagonal(mesh), names, cols);
}

std::vector<ObservationSet> read_dataset_observations(const RunConfig& config,
                                                      std::vector<Eigen::VectorXd>& forces) {
  std::vector<ObservationSet> obs;
  for (int n : config.experiment.levels) {
    const Mesh m = inversion_mesh(config.experiment, n);
    const fs::path dir = level_dir(config.dataset, n);
    obs.push_back(read_observations(dir / "observations.csv", m));
    forces.push_back(read_free_vector(dir / "force.csv", m));
  }
  return obs;
}

struct ReplicateOutcome {
  bool converged = true;
  std::string message;
};

ReplicateOutcome run_replicate(const RunConfig& config, const fs::path& out, Rng& rng) {
  std::unique_ptr<Experiment> exp;
  if (config.dataset.empty()) {
    exp = std::make_unique<Experiment>(config.experiment, rng);
  } else {
    std::vector<Eigen::VectorXd> forces;
    auto obs = read_dataset_observations(config, forces);
    exp = std::make_unique<Experiment>(config.experiment, std::move(obs), std::move(forces));
  }
  write_text(out / "run.cfg", config.to_text());

  const auto& levels = config.experiment.levels;
  std::vector<EmResult> results;
  ReplicateOutcome outcome;
  try {
    exp->run(config.em, rng, results);
  } catch (const EmDivergence& e) {
    EmResult partial;
    partial.trace = e.trace();
    std::vector<int> done(levels.begin(), levels.begin() + results.size() + 1);
    results.push_back(std::move(partial));
    write_trace(out / "trace.csv", done, results);
    outcome.converged = false;
    outcome.message = e.what();
    return outcome;
  }
  write_trace(out / "trace.csv", levels, results);
  for (std::size_t k = 0; k < results.size(); ++k) {
    const Mesh& m = exp->problem(static_cast<int>(k)).mesh();
    write_lambda(level_dir(out, levels[k]) / "lambda.csv", m, results[k].discrepancy.lambda2());
    if (!results[k].converged) {
      outcome.converged = false;
      outcome.message += "level " + std::to_string(levels[k]) + " hit the iteration cap; ";
    }
  }
  const int last = exp->n_levels() - 1;
  const Mesh& m = exp->problem(last).mesh();
  write_samples(out / "samples", results.back().samples);
  write_summary(out / "summary", m,
                summarize(m, results.back().samples, results.back().discrepancy.lambda2(),
                          config.q_lo, config.q_hi));
  return outcome;
}

}  // namespace

int cmd_generate(const RunConfig& config, std::ostream& log) {
  Rng rng(config.seed);
  const Experiment exp(config.experiment, rng);
  write_text(config.output / "config.txt", config.to_text());
  for (int k = 0; k < exp.n_levels(); ++k) {
    const int n = config.experiment.levels[k];
    const Mesh& m = exp.problem(k).mesh();
    const Dataset& d = exp.data(k);
    const fs::path dir = level_dir(config.output, n);
    write_observations(dir / "observations.csv", m, d.observations);
    write_free_vector(dir / "force.csv", m, d.f);
    write_element_table(dir / "truth.csv", m, {"E", "sxx", "syy", "sxy", "pressure", "shear"},
                        {exp.truth(k).E, component(d.stress, 0), component(d.stress, 1),
                         component(d.stress, 2),
                         0.5 * (component(d.stress, 0) + component(d.stress, 1)),
                         component(d.stress, 2)});
    log << "level " << n << ": " << d.observations.size() << " observations, noise std "
        << d.noise_std << "\n";
  }
  log << "seed " << config.seed << ", dataset written to " << config.output.string() << "\n";
  return kExitOk;
}

int cmd_invert(const RunConfig& config, std::ostream& log) {
  std::vector<ReplicateOutcome> outcomes(config.replicates);
  if (config.replicates == 1) {
    Rng rng(config.seed);
    outcomes[0] = run_replicate(config, config.output, rng);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(config.replicates);
    for (int r = 0; r < config.replicates; ++r) {
      pool.emplace_back([&, r] {
        try {
          std::seed_seq seq{static_cast<unsigned>(config.seed & 0xffffffffu),
                            static_cast<unsigned>(config.seed >> 32), static_cast<unsigned>(r)};
          Rng rng(seq);
          outcomes[r] =
              run_replicate(config, config.output / ("replicate_" + std::to_string(r)), rng);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  int status = kExitOk;
  for (int r = 0; r < config.replicates; ++r) {
    if (!outcomes[r].converged) {
      log << "replicate " << r << " did not converge: " << outcomes[r].message << "\n";
      status = kExitNotConverged;
    }
  }
  log << "results written to " << config.output.string() << "\n";
  return status;
}

int cmd_summarize(const RunConfig& config, std::ostream& log) {
  const fs::path run = config.output;
  RunConfig stored;
  for (const auto& [k, v] : parse_key_values(read_text(run / "run.cfg"))) stored.set(k, v);
  const int n = stored.experiment.levels.back();
  const Mesh m = inversion_mesh(stored.experiment, n);
  const SampleStore store = read_samples(run / "samples");
  const CsvTable lam = read_csv(level_dir(run, n) / "lambda.csv");
  const int col = lam.column("lambda2");
  if (static_cast<int>(lam.rows.size()) != m.n_elements())
    throw IoError("discrepancy table does not match the mesh");
  Eigen::VectorXd lambda2(m.n_elements());
  for (int e = 0; e < m.n_elements(); ++e) lambda2(e) = std::stod(lam.rows[e][col]);
  write_summary(run / "summary", m, summarize(m, store, lambda2, config.q_lo, config.q_hi));
  log << "summary written to " << (run / "summary").string() << "\n";
  return kExitOk;
}

}  // namespace elastobayes::cli
