#pragma once

#include "coefficient.hpp"

#include <string>

namespace gmsfem {

/// Experiment description parsed from a plain `key = value` text file.
/// Unknown keys are rejected; `inclusion` may repeat.
struct StudyConfig {
  std::vector<Vector2d> domain = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  std::vector<double> H_list = {0.25};
  double h = 0.0; ///< fine spacing; 0 means "use refine levels"
  int refine = 3; ///< per-H refinement levels when h is not given
  std::vector<std::string> kinds = {"S"};
  std::string f_name = "constant";
  std::vector<double> f_params;
  std::vector<Inclusion> inclusions;
  double contrast = 0.0;          ///< value for inclusions given without one
  std::vector<double> contrasts;  ///< sweep list for spectra/appendix
  int budget_spectral = 0;        ///< 0 = pick by spectral_threshold
  int budget_steklov = 0;         ///< 0 = same as the spectral budget
  int budget_pod = 0;             ///< 0 = pick by pod_threshold
  double spectral_threshold = 1.0;
  double pod_threshold = 1.0;
  int max_local_basis = 24;       ///< cap for threshold-driven budgets
  unsigned seed = 0;
  std::string out_dir = ".";
  int dense_threshold = 400;
  int num_random = 8;             ///< random boundary traces in the sweep
  int workers = 1;
  bool verbose = false;

  int levels_for(double H) const; ///< refinement levels realizing h (or refine)
};

StudyConfig parse_config_text(const std::string& text);
StudyConfig parse_config_file(const std::string& path);

/// Cellwise right-hand side from the named catalogue:
/// constant [c], product_sine [amplitude], piecewise [x_split v_left v_right].
VectorXd make_rhs(const MeshHierarchy& mesh, const StudyConfig& cfg);

} // namespace gmsfem
