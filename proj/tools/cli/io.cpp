#include "io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "elastobayes/errors.hpp"

namespace fs = std::filesystem;

namespace elastobayes::cli {

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& file, const std::string& content) {
  std::error_code ec;
  if (file.has_parent_path()) fs::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out << content;
  if (!out) throw IoError("write failed for " + file.string());
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return static_cast<int>(k);
  throw IoError("missing CSV column '" + name + "'");
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("malformed number '" + s + "'");
  }
  if (used != s.size()) throw IoError("malformed number '" + s + "'");
  return x;
}

int parse_int(const std::string& s) {
  const double x = parse_double(s);
  if (x != static_cast<int>(x)) throw IoError("expected an integer, got '" + s + "'");
  return static_cast<int>(x);
}

int node_component(const std::string& s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  throw IoError("dof must be x or y, got '" + s + "'");
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    out += cells[k];
  }
  out += '\n';
  return out;
}

void write_matrix_rows(const fs::path& file, const std::string& prefix, int width,
                       const std::vector<Eigen::VectorXd>& rows) {
  std::string text = "sample";
  for (int k = 0; k < width; ++k) text += "," + prefix + std::to_string(k);
  text += '\n';
  for (std::size_t s = 0; s < rows.size(); ++s) {
    text += std::to_string(s);
    for (int k = 0; k < width; ++k) text += "," + format_number(rows[s](k));
    text += '\n';
  }
  write_text(file, text);
}

std::vector<Eigen::VectorXd> read_matrix_rows(const fs::path& file) {
  const CsvTable t = read_csv(file);
  std::vector<Eigen::VectorXd> out;
  const int width = static_cast<int>(t.header.size()) - 1;
  for (const auto& row : t.rows) {
    if (static_cast<int>(row.size()) != width + 1) throw IoError("ragged row in " + file.string());
    Eigen::VectorXd v(width);
    for (int k = 0; k < width; ++k) v(k) = parse_double(row[k + 1]);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      t.header = split(line);
      first = false;
    } else {
      t.rows.push_back(split(line));
    }
  }
  if (first) throw IoError("empty CSV");
  return t;
}

CsvTable read_csv(const fs::path& file) {
  try {
    return parse_csv(read_text(file));
  } catch (const IoError& e) {
    throw IoError(file.string() + ": " + e.what());
  }
}

void write_observations(const fs::path& file, const Mesh& mesh, const ObservationSet& obs) {
  std::string text = "node_id,dof,value\n";
  for (int k = 0; k < obs.size(); ++k) {
    const int g = mesh.dofs.free_to_global[obs.dof[k]];
    text += std::to_string(g / 2) + (g % 2 ? ",y," : ",x,") + format_number(obs.values(k)) + '\n';
  }
  write_text(file, text);
}

ObservationSet read_observations(const fs::path& file, const Mesh& mesh) {
  const CsvTable t = read_csv(file);
  const int cn = t.column("node_id"), cd = t.column("dof"), cv = t.column("value");
  ObservationSet obs;
  std::vector<double> values;
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw IoError(file.string() + ": ragged row");
    const int node = parse_int(row[cn]);
    if (node < 0 || node >= mesh.n_nodes()) throw IoError(file.string() + ": unknown node");
    const int g = 2 * node + node_component(row[cd]);
    const int slot = mesh.dofs.free_index[g];
    if (slot < 0) throw IoError(file.string() + ": observation on a prescribed DOF");
    obs.dof.push_back(slot);
    values.push_back(parse_double(row[cv]));
  }
  obs.values = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return obs;
}

void write_free_vector(const fs::path& file, const Mesh& mesh, const Eigen::VectorXd& v) {
  ObservationSet all;
  all.values = v;
  all.dof.resize(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) all.dof[k] = static_cast<int>(k);
  write_observations(file, mesh, all);
}

Eigen::VectorXd read_free_vector(const fs::path& file, const Mesh& mesh) {
  const ObservationSet o = read_observations(file, mesh);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mesh.n_free());
  std::vector<bool> seen(mesh.n_free(), false);
  for (int k = 0; k < o.size(); ++k) {
    v(o.dof[k]) = o.values(k);
    seen[o.dof[k]] = true;
  }
  for (bool s : seen)
    if (!s) throw IoError(file.string() + ": free DOF missing from force table");
  return v;
}

void write_element_table(const fs::path& file, const Mesh& mesh,
                         const std::vector<std::string>& names,
                         const std::vector<Eigen::VectorXd>& columns) {
  std::vector<int> all(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e) all[e] = e;
  std::vector<std::string> head = {"elem_id", "cx", "cy"};
  head.insert(head.end(), names.begin(), names.end());
  std::string text = join_row(head);
  for (int e : all) {
    std::vector<std::string> cells = {std::to_string(e), format_number(mesh.centroid[e].x()),
                                      format_number(mesh.centroid[e].y())};
    for (const auto& c : columns) cells.push_back(format_number(c(e)));
    text += join_row(cells);
  }
  write_text(file, text);
}

void write_transect_table(const fs::path& file, const Mesh& mesh,
                          const std::vector<int>& elements, const std::vector<std::string>& names,
                          const std::vector<Eigen::VectorXd>& columns) {
  std::vector<std::string> head = {"position", "elem_id", "cx", "cy"};
  head.insert(head.end(), names.begin(), names.end());
  std::string text = join_row(head);
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const int e = elements[k];
    std::vector<std::string> cells = {std::to_string(k), std::to_string(e),
                                      format_number(mesh.centroid[e].x()),
                                      format_number(mesh.centroid[e].y())};
    for (const auto& c : columns) cells.push_back(format_number(c(e)));
    text += join_row(cells);
  }
  write_text(file, text);
}

void write_node_table(const fs::path& file, const Mesh& mesh, const Eigen::VectorXd& u_full) {
  std::string text = "node_id,x,y,ux,uy\n";
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    text += join_row({std::to_string(n), format_number(mesh.nodes[n].x()),
                      format_number(mesh.nodes[n].y()), format_number(u_full(2 * n)),
                      format_number(u_full(2 * n + 1))});
  }
  write_text(file, text);
}

void write_trace(const fs::path& file, const std::vector<int>& levels,
                 const std::vector<EmResult>& results) {
  std::string text = "level,iteration,Q_tilde,rel_increase\n";
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& t = results[k].trace;
    for (int j = 0; j < t.iterations(); ++j) {
      text += join_row({std::to_string(levels[k]), std::to_string(j + 1), format_number(t.q[j]),
                        std::isnan(t.rel_increase[j]) ? std::string("nan")
                                                      : format_number(t.rel_increase[j])});
    }
  }
  write_text(file, text);
}

void write_samples(const fs::path& dir, const SampleStore& store) {
  if (store.size() == 0) throw InvalidArgument("empty sample store");
  write_matrix_rows(dir / "samples_E.csv", "E", static_cast<int>(store.E[0].size()), store.E);
  write_matrix_rows(dir / "samples_sigma.csv", "s", static_cast<int>(store.sigma[0].size()),
                    store.sigma);
  write_matrix_rows(dir / "samples_u.csv", "u", static_cast<int>(store.u[0].size()), store.u);
  std::vector<Eigen::VectorXd> nu2;
  for (double v : store.nu2) nu2.push_back(Eigen::VectorXd::Constant(1, v));
  write_matrix_rows(dir / "samples_nu2.csv", "nu2_", 1, nu2);
}

SampleStore read_samples(const fs::path& dir) {
  SampleStore s;
  s.E = read_matrix_rows(dir / "samples_E.csv");
  s.sigma = read_matrix_rows(dir / "samples_sigma.csv");
  s.u = read_matrix_rows(dir / "samples_u.csv");
  for (const auto& v : read_matrix_rows(dir / "samples_nu2.csv")) s.nu2.push_back(v(0));
  if (s.sigma.size() != s.E.size() || s.u.size() != s.E.size() || s.nu2.size() != s.E.size())
    throw IoError(dir.string() + ": sample files have different lengths");
  return s;
}

}  // namespace elastobayes::cli
