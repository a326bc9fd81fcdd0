#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "elastobayes/mesh.hpp"
#include "elastobayes/problem.hpp"
#include "elastobayes/saem.hpp"

namespace elastobayes::cli {

std::string read_text(const std::filesystem::path& file);
// Creates missing parent directories.
void write_text(const std::filesystem::path& file, const std::string& content);

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // throws IoError when missing
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& file);

// node_id,dof,value with dof in {x, y}; one row per observed free DOF.
void write_observations(const std::filesystem::path& file, const Mesh& mesh,
                        const ObservationSet& obs);
ObservationSet read_observations(const std::filesystem::path& file, const Mesh& mesh);

// Free-DOF vector in the observation layout.
void write_free_vector(const std::filesystem::path& file, const Mesh& mesh,
                       const Eigen::VectorXd& v);
Eigen::VectorXd read_free_vector(const std::filesystem::path& file, const Mesh& mesh);

// elem_id,cx,cy,<names...>
void write_element_table(const std::filesystem::path& file, const Mesh& mesh,
                         const std::vector<std::string>& names,
                         const std::vector<Eigen::VectorXd>& columns);
// Element subset in the given order, with a leading position column.
void write_transect_table(const std::filesystem::path& file, const Mesh& mesh,
                          const std::vector<int>& elements, const std::vector<std::string>& names,
                          const std::vector<Eigen::VectorXd>& columns);
// node_id,x,y,ux,uy
void write_node_table(const std::filesystem::path& file, const Mesh& mesh,
                      const Eigen::VectorXd& u_full);

// level,iteration,Q_tilde,rel_increase
void write_trace(const std::filesystem::path& file, const std::vector<int>& levels,
                 const std::vector<EmResult>& results);

// samples_{E,sigma,u,nu2}.csv in `dir`, one row per sample.
void write_samples(const std::filesystem::path& dir, const SampleStore& store);
SampleStore read_samples(const std::filesystem::path& dir);

}  // namespace elastobayes::cli
