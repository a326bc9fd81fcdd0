#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "elastobayes/errors.hpp"
#include "io.hpp"

namespace elastobayes::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "+inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument(key + ": not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw InvalidArgument(key + ": not an integer: '" + v + "'");
  return x;
}

std::string fmt(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k = {
      "levels",  "element",        "regime",        "poisson_ratio", "d0",
      "sigma_z2", "sigma_u2",      "alpha_nu",      "beta_nu",       "patch_rings",
      "sweeps",  "p",              "epsilon",       "max_iterations", "final_samples",
      "gibbs",   "example",        "dataset",       "snr_db",        "seed",
      "output",  "loading",        "fine",          "replicates",    "q_lo",
      "q_hi"};
  return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto& x = experiment;
  if (key == "levels") {
    x.levels.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) x.levels.push_back(static_cast<int>(to_int(key, trim(item))));
  } else if (key == "element") {
    if (v == "quad") x.kind = ElementKind::ConstantStrainQuad;
    else if (v == "triangle") x.kind = ElementKind::TrianglePair;
    else throw InvalidArgument("element must be quad or triangle");
  } else if (key == "regime") {
    if (v == "plane_stress") x.base.regime = Regime::PlaneStress;
    else if (v == "plane_strain") x.base.regime = Regime::PlaneStrain;
    else throw InvalidArgument("regime must be plane_stress or plane_strain");
  } else if (key == "poisson_ratio") {
    x.base.poisson_ratio = to_double(key, v);
  } else if (key == "d0") {
    x.d0 = to_double(key, v);
  } else if (key == "sigma_z2") {
    x.sigma_z2 = to_double(key, v);
  } else if (key == "sigma_u2") {
    x.sigma_u2 = to_double(key, v);
  } else if (key == "alpha_nu") {
    x.noise.alpha = to_double(key, v);
  } else if (key == "beta_nu") {
    x.noise.beta = to_double(key, v);
  } else if (key == "patch_rings") {
    x.patch_rings = static_cast<int>(to_int(key, v));
  } else if (key == "sweeps") {
    em.sweeps_per_iteration = static_cast<int>(to_int(key, v));
  } else if (key == "p") {
    em.p = to_double(key, v);
  } else if (key == "epsilon") {
    em.epsilon = to_double(key, v);
  } else if (key == "max_iterations") {
    em.max_iterations = static_cast<int>(to_int(key, v));
  } else if (key == "final_samples") {
    em.final_samples = static_cast<int>(to_int(key, v));
  } else if (key == "gibbs") {
    if (v == "full") em.mode = GibbsMode::Full;
    else if (v == "block") em.mode = GibbsMode::Block;
    else throw InvalidArgument("gibbs must be full or block");
  } else if (key == "example") {
    x.example = static_cast<int>(to_int(key, v));
  } else if (key == "dataset") {
    dataset = v;
  } else if (key == "snr_db") {
    x.snr_db = to_double(key, v);
  } else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) throw InvalidArgument("seed must be non-negative");
    seed = static_cast<unsigned long long>(s);
  } else if (key == "output") {
    output = v;
  } else if (key == "loading") {
    x.load = load_case(v);
    loading = v;
  } else if (key == "fine") {
    x.fine = static_cast<int>(to_int(key, v));
  } else if (key == "replicates") {
    replicates = static_cast<int>(to_int(key, v));
  } else if (key == "q_lo") {
    q_lo = to_double(key, v);
  } else if (key == "q_hi") {
    q_hi = to_double(key, v);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  experiment.validate();
  validate_saem_exponent(em.p);
  if (em.sweeps_per_iteration < 1) throw InvalidArgument("sweeps must be positive");
  if (!(em.epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  if (em.max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
  if (em.final_samples < 1) throw InvalidArgument("final_samples must be positive");
  if (replicates < 1) throw InvalidArgument("replicates must be positive");
  if (!(q_lo >= 0.0 && q_lo <= q_hi && q_hi <= 1.0))
    throw InvalidArgument("quantiles must satisfy 0 <= q_lo <= q_hi <= 1");
}

std::string RunConfig::to_text() const {
  const auto& x = experiment;
  std::ostringstream os;
  os << "levels = ";
  for (std::size_t k = 0; k < x.levels.size(); ++k) os << (k ? "," : "") << x.levels[k];
  os << "\nelement = " << (x.kind == ElementKind::ConstantStrainQuad ? "quad" : "triangle")
     << "\nregime = " << (x.base.regime == Regime::PlaneStress ? "plane_stress" : "plane_strain")
     << "\npoisson_ratio = " << fmt(x.base.poisson_ratio)
     << "\nd0 = " << fmt(x.d0)
     << "\nsigma_z2 = " << fmt(x.sigma_z2)
     << "\nsigma_u2 = " << fmt(x.sigma_u2)
     << "\nalpha_nu = " << fmt(x.noise.alpha)
     << "\nbeta_nu = " << fmt(x.noise.beta)
     << "\npatch_rings = " << x.patch_rings
     << "\nsweeps = " << em.sweeps_per_iteration
     << "\np = " << fmt(em.p)
     << "\nepsilon = " << fmt(em.epsilon)
     << "\nmax_iterations = " << em.max_iterations
     << "\nfinal_samples = " << em.final_samples
     << "\ngibbs = " << (em.mode == GibbsMode::Full ? "full" : "block")
     << "\nexample = " << x.example
     << "\ndataset = " << dataset.string()
     << "\nsnr_db = " << fmt(x.snr_db)
     << "\nseed = " << seed
     << "\noutput = " << output.string()
     << "\nloading = " << loading
     << "\nfine = " << x.fine
     << "\nreplicates = " << replicates
     << "\nq_lo = " << fmt(q_lo)
     << "\nq_hi = " << fmt(q_hi) << "\n";
  return os.str();
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig load_config(const std::filesystem::path& file,
                      const std::map<std::string, std::string>& overrides) {
  RunConfig cfg;
  if (!file.empty()) {
    for (const auto& [k, v] : parse_key_values(read_text(file))) cfg.set(k, v);
  }
  for (const auto& [k, v] : overrides) cfg.set(k, v);
  cfg.validate();
  return cfg;
}

}  // namespace elastobayes::cli
