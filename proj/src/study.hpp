#pragma once

#include "analysis.hpp"
#include "config.hpp"
#include "global_space.hpp"
#include "pou.hpp"
#include "snapshots.hpp"

#include <iosfwd>

namespace gmsfem {

/// Shared state for all space kinds at one (H, contrast): meshes, coefficient,
/// partition of unity, fine operators and the reference solution.
struct Pipeline {
  Pipeline(const StudyConfig& cfg, double H, double contrast_override = 0.0);

  MeshHierarchy mesh;
  CoefficientField kappa;
  PartitionOfUnity pou;
  WeightField weights;
  std::vector<CoarseNeighborhood> nbhds;
  SpMat A;        ///< fine kappa stiffness
  VectorXd cell_f;
  VectorXd b;     ///< fine load vector
  SolutionField u_h;
};

/// One results-table row.
struct RunRow {
  std::string run_id;
  std::string kind;
  double H = 0, h = 0, contrast = 1;
  int dim_space = 0;
  double energy_error = 0, l2_ktilde_error = 0;
  double min_lambda_S = 0, min_lambda_T = 0, min_lambda_H = 0;
  double C_poin_max = 0, C0 = 0, seconds = 0;
};

std::string csv_header();
std::string csv_row(const RunRow& r);

/// Run one coarse space kind on a prepared pipeline; returns the results row
/// and, if `u_out` is given, the coarse solution on the fine grid.
RunRow run_kind(const Pipeline& p, const StudyConfig& cfg,
                const std::string& kind, VectorXd* u_out = nullptr);

/// Least-squares slope of log(err) vs log(H) over the `points` finest entries.
double fit_rate(const std::vector<double>& H, const std::vector<double>& err,
                int points = 3);

/// Subcommand drivers; write artifacts under cfg.out_dir.
void run_solve(const StudyConfig& cfg);
void run_study(const StudyConfig& cfg);
void run_spectra(const StudyConfig& cfg);
void run_appendix(const StudyConfig& cfg);

/// Dispatch by subcommand name ("solve" | "study" | "spectra" | "appendix").
void run_command(const std::string& cmd, const StudyConfig& cfg);

} // namespace gmsfem
