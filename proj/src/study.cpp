#include "study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

namespace gmsfem {

namespace {

std::vector<Inclusion> scaled_inclusions(const StudyConfig& cfg,
                                         double contrast_override) {
  std::vector<Inclusion> incs = cfg.inclusions;
  if (contrast_override > 0)
    for (auto& inc : incs) inc.value = contrast_override;
  return incs;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void write_solution(const std::string& path, const VectorXd& u) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << "node,value\n";
  for (int i = 0; i < u.size(); ++i) out << i << "," << fmt(u[i]) << "\n";
}

std::ofstream open_out(const StudyConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  return out;
}

} // namespace

Pipeline::Pipeline(const StudyConfig& cfg, double H, double contrast_override)
    : mesh(build_hierarchy(cfg.domain, H, cfg.levels_for(H))),
      kappa(make_inclusions(mesh, scaled_inclusions(cfg, contrast_override))),
      pou(mesh, kappa),
      weights(compute_weights(mesh, kappa, pou)),
      nbhds(neighborhoods(mesh)),
      A(assemble_stiffness(MeshRef(mesh), kappa.cell_kappa)),
      cell_f(make_rhs(mesh, cfg)),
      b(assemble_load(MeshRef(mesh), cell_f)),
      u_h(solve_fine(mesh, kappa, cell_f)) {}

std::string csv_header() {
  return "run_id, kind, H, h, contrast, dim_space, energy_error, "
         "l2_ktilde_error, min_lambda_S, min_lambda_T, min_lambda_H, "
         "C_poin_max, C0, seconds";
}

std::string csv_row(const RunRow& r) {
  char sec[32];
  std::snprintf(sec, sizeof(sec), "%.3f", r.seconds);
  std::string s = r.run_id + ", " + r.kind + ", " + fmt(r.H) + ", " + fmt(r.h) +
                  ", " + fmt(r.contrast) + ", " + std::to_string(r.dim_space) +
                  ", " + fmt(r.energy_error) + ", " + fmt(r.l2_ktilde_error) +
                  ", " + fmt(r.min_lambda_S) + ", " + fmt(r.min_lambda_T) +
                  ", " + fmt(r.min_lambda_H) + ", " + fmt(r.C_poin_max) + ", " +
                  fmt(r.C0) + ", " + sec;
  return s;
}

RunRow run_kind(const Pipeline& p, const StudyConfig& cfg,
                const std::string& kind, VectorXd* u_out) {
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceKind sk = space_kind_from_name(kind);
  const double H = p.mesh.H;
  const int N = static_cast<int>(p.nbhds.size());

  RunRow row;
  row.kind = kind;
  row.H = H;
  row.h = p.mesh.h;
  row.contrast = p.kappa.contrast();
  row.run_id = kind + "-H" + fmt(H) + "-L" + fmt(row.contrast);
  row.C0 = p.pou.max_gradient();

  double minS = -1, minT = -1, minH = -1;
  std::vector<std::vector<VectorXd>> members(N);
  for (int i = 0; i < N; ++i) {
    const LocalOperators ops =
        make_local_operators(p.nbhds[i], p.kappa, p.weights);
    const int n = p.nbhds[i].mesh.num_nodes();
    const int nbn = p.nbhds[i].mesh.num_boundary();

    if (sk == SpaceKind::Spectral) {
      const int want = cfg.budget_spectral > 0 ? cfg.budget_spectral - 1
                                               : cfg.max_local_basis - 1;
      const int count = std::min(want, n - 1);
      const LocalBasisSet spec =
          solve_neumann_eig(ops, count, cfg.dense_threshold, cfg.seed);
      int lI;
      if (cfg.budget_spectral > 0) {
        lI = std::min(cfg.budget_spectral, count + 1);
      } else {
        lI = count + 1;
        for (int l = 2; l <= count + 1; ++l)
          if (H * H * spec.eigenvalues[l - 2] >= cfg.spectral_threshold) {
            lI = l;
            break;
          }
      }
      if (lI >= 2) {
        const double lam = spec.eigenvalues[lI - 2];
        minS = minS < 0 ? lam : std::min(minS, lam);
      }

      const int lII = std::min(cfg.budget_steklov > 0 ? cfg.budget_steklov : lI,
                               nbn - 1);
      const LocalBasisSet stek =
          solve_steklov_eig(ops, std::min(lII + 1, nbn));
      if (lII + 1 <= stek.eigenvalues.size()) {
        const double lam = stek.eigenvalues[lII];
        minT = minT < 0 ? lam : std::min(minT, lam);
      }

      auto& cols = members[i];
      cols.push_back(VectorXd::Ones(n));
      for (int j = 0; j + 1 < lI; ++j) cols.push_back(spec.members.col(j));
      // The Steklov kernel member is the constant again; skip the duplicate.
      for (int j = 1; j < lII; ++j) cols.push_back(stek.members.col(j));
      cols.push_back(solve_corrector(ops));
    } else {
      const SnapshotSpace snap = build_snapshots(ops);
      if (sk == SpaceKind::Snapshot) {
        for (int j = 0; j < snap.count(); ++j)
          members[i].push_back(snap.phi.col(j));
      } else {
        const PodBasis pod = pod_reduce(ops, snap, snap.count());
        const int avail = static_cast<int>(pod.members.cols());
        int l = cfg.budget_pod > 0
                    ? std::min(cfg.budget_pod, avail)
                    : pod_rank_from_threshold(pod.eigenvalues, H,
                                              cfg.pod_threshold);
        l = std::min(l, avail);
        if (l < avail) {
          const double lam = pod.eigenvalues[l];
          minH = minH < 0 ? lam : std::min(minH, lam);
        }
        for (int j = 0; j < l; ++j) members[i].push_back(pod.members.col(j));
      }
    }
  }
  row.min_lambda_S = minS < 0 ? 0 : minS;
  row.min_lambda_T = minT < 0 ? 0 : minT;
  row.min_lambda_H = minH < 0 ? 0 : minH;

  const GlobalSpace space =
      assemble_global(sk, p.mesh, p.pou, p.nbhds, members, p.A);
  row.dim_space = space.dim();
  const CoarseSolveResult sol = solve_coarse(space, p.A, p.b);
  const VectorXd e = p.u_h.values - sol.u;
  row.energy_error = std::sqrt(std::max(0.0, energy_norm_sq(p.A, e)));
  row.l2_ktilde_error =
      std::sqrt(weighted_l2_sq(MeshRef(p.mesh), p.weights.cell_ktilde, e));

  double cp = 0;
  for (const auto& nb : p.nbhds)
    cp = std::max(cp, friedrichs_constant(
                          nb.mesh, restrict_cells(p.kappa.cell_kappa, nb.mesh),
                          H, cfg.dense_threshold));
  row.C_poin_max = cp;
  row.seconds = elapsed_since(t0);
  if (u_out) *u_out = sol.u;
  if (cfg.verbose)
    std::cerr << "[" << row.run_id << "] dim=" << row.dim_space
              << " energy_error=" << row.energy_error << "\n";
  return row;
}

double fit_rate(const std::vector<double>& H, const std::vector<double>& err,
                int points) {
  const int n = static_cast<int>(H.size());
  const int m = std::min(points, n);
  if (m < 2) throw NumericError("fit_rate: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = n - m; i < n; ++i) {
    const double x = std::log(H[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

void run_solve(const StudyConfig& cfg) {
  const Pipeline p(cfg, cfg.H_list[0]);
  std::ofstream results = open_out(cfg, "results.csv");
  results << csv_header() << "\n";
  write_solution(cfg.out_dir + "/u_fine.csv", p.u_h.values);
  for (const auto& kind : cfg.kinds) {
    VectorXd u;
    results << csv_row(run_kind(p, cfg, kind, &u)) << "\n";
    write_solution(cfg.out_dir + "/u_" + kind + ".csv", u);
  }
}

void run_study(const StudyConfig& cfg) {
  std::ofstream results = open_out(cfg, "results.csv");
  results << csv_header() << "\n";
  std::vector<std::vector<double>> errs(cfg.kinds.size());
  for (double H : cfg.H_list) {
    const Pipeline p(cfg, H);
    for (size_t k = 0; k < cfg.kinds.size(); ++k) {
      const RunRow row = run_kind(p, cfg, cfg.kinds[k]);
      results << csv_row(row) << "\n";
      errs[k].push_back(row.energy_error);
    }
  }
  std::ofstream rates = open_out(cfg, "rates.txt");
  // H_list is sorted decreasing; fit over the finest (last) points.
  for (size_t k = 0; k < cfg.kinds.size(); ++k)
    rates << cfg.kinds[k] << " "
          << fmt(fit_rate(cfg.H_list, errs[k])) << "\n";
}

void run_spectra(const StudyConfig& cfg) {
  std::vector<double> contrasts = cfg.contrasts;
  if (contrasts.empty())
    contrasts = {cfg.contrast > 0 ? cfg.contrast : 1.0};
  std::ofstream out = open_out(cfg, "spectra.csv");
  out << "contrast,neighborhood,kind,j,lambda\n";
  for (double lam : contrasts) {
    const Pipeline p(cfg, cfg.H_list[0], lam);
    for (size_t i = 0; i < p.nbhds.size(); ++i) {
      const LocalOperators ops =
          make_local_operators(p.nbhds[i], p.kappa, p.weights);
      const int n = p.nbhds[i].mesh.num_nodes();
      const int nbn = p.nbhds[i].mesh.num_boundary();

      const LocalBasisSet spec = solve_neumann_eig(
          ops, std::min(cfg.max_local_basis - 1, n - 1), cfg.dense_threshold,
          cfg.seed);
      out << fmt(lam) << "," << i << ",S,1,0\n";
      for (int j = 0; j < spec.eigenvalues.size(); ++j)
        out << fmt(lam) << "," << i << ",S," << j + 2 << ","
            << fmt(spec.eigenvalues[j]) << "\n";

      const LocalBasisSet stek =
          solve_steklov_eig(ops, std::min(cfg.max_local_basis, nbn));
      for (int j = 0; j < stek.eigenvalues.size(); ++j)
        out << fmt(lam) << "," << i << ",T," << j + 1 << ","
            << fmt(stek.eigenvalues[j]) << "\n";

      const SnapshotSpace snap = build_snapshots(ops);
      const PodBasis pod = pod_reduce(ops, snap, snap.count());
      const int keep = std::min<int>(cfg.max_local_basis,
                                     static_cast<int>(pod.eigenvalues.size()));
      for (int j = 0; j < keep; ++j)
        out << fmt(lam) << "," << i << ",H," << j + 1 << ","
            << fmt(pod.eigenvalues[j]) << "\n";
    }
  }
}

void run_appendix(const StudyConfig& cfg) {
  std::vector<double> contrasts = cfg.contrasts;
  if (contrasts.empty()) contrasts = {1.0, 1e2, 1e4, 1e6};
  std::ofstream out = open_out(cfg, "appendix.csv");
  out << "contrast,max_ratio,constant_ratio\n";
  for (double lam : contrasts) {
    const Pipeline p(cfg, cfg.H_list[0], lam);
    // Deterministic probe region: the neighborhood of the coarse node closest
    // to the domain center (lowest index on ties).
    const Vector2d center = 0.5 * (p.mesh.lo + p.mesh.hi);
    int best = 0;
    double bestd = std::numeric_limits<double>::max();
    for (int i = 0; i < p.mesh.num_coarse_nodes(); ++i) {
      const double d = (p.mesh.coarse_nodes[i] - center).norm();
      if (d < bestd - 1e-14) {
        bestd = d;
        best = i;
      }
    }
    const LocalOperators ops =
        make_local_operators(p.nbhds[best], p.kappa, p.weights);
    const StabilitySample s = stability_sweep(ops, cfg.num_random, cfg.seed);
    out << fmt(lam) << "," << fmt(s.max_ratio) << "," << fmt(s.constant_ratio)
        << "\n";
  }
}

void run_command(const std::string& cmd, const StudyConfig& cfg) {
  if (cmd == "solve")
    run_solve(cfg);
  else if (cmd == "study")
    run_study(cfg);
  else if (cmd == "spectra")
    run_spectra(cfg);
  else if (cmd == "appendix")
    run_appendix(cfg);
  else
    throw ConfigError("unknown command '" + cmd + "'");
}

} // namespace gmsfem
