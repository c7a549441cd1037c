// Command-line front end: single computations and batch experiments.

#include "octa/embeddability.hpp"
#include "octa/experiments.hpp"
#include "octa/octahedral.hpp"
#include "octa/parallel.hpp"
#include "octa/spaces.hpp"
#include "octa/tensor_norms.hpp"
#include "octa/witnesses.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace octa;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  double tol = 0.0;  // 0: module default
  int jobs = 1;
  std::string out;
  bool break_witness = false;
};

// CSV goes to --out when given, else to stdout after the text block.
void emit_csv(const Globals& g, const std::string& csv) {
  if (g.out.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  require(static_cast<bool>(f), "cannot write " + g.out);
  f << csv;
}

std::string header(const std::string& what, const Globals& g, const std::string& columns) {
  return std::string("# ") + kCsvVersion + " experiment=" + what + " seed=" + std::to_string(g.seed) + "\n" + columns +
         "\n";
}

std::vector<Vec> matrix_rows(const Mat& M) {
  std::vector<Vec> out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) out.push_back(M.row(i).transpose());
  return out;
}

std::string report_block(const WitnessCheck& r) {
  std::ostringstream s;
  for (std::size_t i = 0; i < r.values.size(); ++i) s << "value." << i << " = " << csv_number(r.values[i]) << '\n';
  s << "min = " << csv_number(r.min_value()) << '\n';
  s << "bound = " << csv_number(r.bound) << '\n';
  s << "passed = " << (r.passed ? "true" : "false") << '\n';
  return s.str();
}

int finish(const Globals& g, const ExperimentResult& r) {
  emit_csv(g, r.csv);
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Octahedral norms in finite-dimensional tensor products"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", g.tol, "cutting-plane / verifier tolerance");
  app.add_option("--jobs", g.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "CSV output path (default stdout)");
  app.add_flag("--debug-break-witness", g.break_witness, "corrupt generated witnesses (tests the exit status)");

  // norm
  auto* norm = app.add_subcommand("norm", "norm of a vector");
  std::string space_text, vector_text;
  bool dual = false;
  norm->add_option("--space", space_text, "lp:<p>:<n> or wl1:<w,...>")->required();
  norm->add_option("--vector", vector_text, "space-separated coordinates")->required();
  norm->add_flag("--dual", dual, "evaluate the dual norm");

  // tensor-norm
  auto* tnorm = app.add_subcommand("tensor-norm", "injective or projective norm of a tensor");
  std::string x_text, y_text, matrix_path, kind = "injective";
  tnorm->add_option("--x", x_text, "first factor")->required();
  tnorm->add_option("--y", y_text, "second factor")->required();
  tnorm->add_option("--matrix", matrix_path, "coefficient matrix file")->required();
  tnorm->add_option("--kind", kind)->check(CLI::IsMember({"injective", "projective"}))->capture_default_str();

  // defect
  auto* defect = app.add_subcommand("defect", "octahedrality defect of a family");
  std::string family_path, mode = "octa";
  int starts = 8;
  double grid = 1e-3;
  defect->add_option("--space", space_text)->required();
  defect->add_option("--family", family_path, "matrix file, one member per row")->required();
  defect->add_option("--mode", mode)->check(CLI::IsMember({"octa", "alt"}))->capture_default_str();
  defect->add_option("--starts", starts)->capture_default_str();
  defect->add_option("--grid", grid)->capture_default_str();

  // witness
  auto* witness = app.add_subcommand("witness", "build and verify a witness");
  std::string witness_kind, psi_path, t0_path;
  std::vector<std::string> op_paths;
  double eps = 0.05;
  witness->add_option("--kind", witness_kind)->required()->check(
      CLI::IsMember({"shift", "interval", "rankone", "oplus1"}));
  witness->add_option("--space", space_text, "domain X of the operators");
  witness->add_option("--ops", op_paths, "operator / tensor matrix files")->delimiter(',');
  witness->add_option("--psi", psi_path, "embedding X -> lp(1,d) (shift; default identity)");
  witness->add_option("--t0", t0_path, "isometry X -> wl1(N) (interval)");
  witness->add_option("--eps", eps)->capture_default_str();
  witness->add_option("--x", x_text, "first factor (rankone)");
  witness->add_option("--y", y_text, "second factor (rankone, oplus1)");
  witness->add_option("--matrix", matrix_path, "tensor z (oplus1)");
  witness->add_option("--vector", vector_text, "unit y (oplus1)");

  // cutcone
  auto* cutcone = app.add_subcommand("cutcone", "cut-cone membership, distortion and search");
  std::string points_path, cc_mode = "member";
  int k_points = 6, budget = 10000;
  cutcone->add_option("--points", points_path, "matrix file, one point per row");
  cutcone->add_option("--space", space_text);
  cutcone->add_option("--k", k_points)->capture_default_str();
  cutcone->add_option("--budget", budget)->capture_default_str();
  cutcone->add_option("--mode", cc_mode)->check(CLI::IsMember({"member", "distortion", "search"}))->capture_default_str();

  // certify / dichotomy share the experiment runner
  ExperimentConfig ec;
  std::string p_list = "1.5", n_list = "3", m_list = "8";
  auto* certify = app.add_subcommand("certify", "non-octahedrality certificate");
  certify->add_option("--p", p_list)->capture_default_str();
  certify->add_option("--n", n_list)->capture_default_str();
  certify->add_option("--m", m_list)->capture_default_str();
  certify->add_option("--budget", ec.budget)->capture_default_str();

  auto* dichotomy = app.add_subcommand("dichotomy", "defect scan over m");
  dichotomy->add_option("--p", p_list, "comma list, inf allowed")->capture_default_str();
  dichotomy->add_option("--n", n_list)->capture_default_str();
  dichotomy->add_option("--m", m_list)->capture_default_str();
  dichotomy->add_option("--k", ec.k)->capture_default_str();
  dichotomy->add_option("--families", ec.families)->capture_default_str();
  dichotomy->add_option("--starts", ec.starts)->capture_default_str();
  dichotomy->add_option("--budget", ec.budget, "obstruction search budget for 1 < p < 2")->capture_default_str();

  auto* run = app.add_subcommand("run", "run a key=value experiment config");
  std::string config_path;
  run->add_option("config", config_path)->required();

  CLI11_PARSE(app, argc, argv);
  set_jobs(g.jobs);

  try {
    if (*norm) {
      const auto X = NormedSpace::parse(space_text);
      const auto S = dual ? X.dual() : X;
      const Vec v = parse_vector(vector_text);
      const double value = S.norm(v);
      std::cout << "space = " << S.to_string() << "\nvalue = " << csv_number(value) << '\n';
      if (value > 0.0) std::cout << "norming = " << format_vector(S.norming_functional(v / value)) << '\n';
      if (!g.out.empty()) emit_csv(g, header("norm", g, "space,value") + S.to_string() + "," + csv_number(value) + "\n");
      return 0;
    }
    if (*tnorm) {
      const Tensor u(NormedSpace::parse(x_text), NormedSpace::parse(y_text), read_matrix_file(matrix_path));
      NormCertificate c;
      if (kind == "injective") {
        c = injective_norm(u);
      } else {
        ProjectiveOptions o;
        if (g.tol > 0.0) o.tol = g.tol;
        c = projective_norm(u, o);
      }
      std::cout << format_certificate(c);
      if (!g.out.empty())
        emit_csv(g, header("tensor-norm", g, "x,y,kind,value,lower,upper,exactness") + u.X.to_string() + "," +
                        u.Y.to_string() + "," + kind + "," + csv_number(c.value) + "," + csv_number(c.lower) + "," +
                        csv_number(c.upper) + "," + (c.exact() ? "exact" : "bounds") + "\n");
      return 0;
    }
    if (*defect) {
      const auto X = NormedSpace::parse(space_text);
      const auto fam = matrix_rows(read_matrix_file(family_path));
      DefectConfig dc;
      dc.starts = starts;
      dc.grid = grid;
      dc.seed = g.seed;
      const auto r = mode == "octa" ? family_defect(X, fam, dc) : alt_family_defect(X, fam, dc);
      std::cout << "mode = " << to_string(r.mode) << "\nlabel = " << DefectReport::kLabel
                << "\ndefect = " << csv_number(r.defect) << "\nsource = " << r.source
                << "\nwitness = " << format_vector(r.witness) << "\nseed = " << r.provenance.seed
                << "\nstarts = " << r.provenance.starts << "\ngrid = " << csv_number(r.provenance.grid)
                << "\ncandidates = " << r.provenance.candidates << '\n';
      if (!g.out.empty())
        emit_csv(g, header("defect", g, "space,mode,family_size,defect,source") + X.to_string() + "," +
                        to_string(r.mode) + "," + std::to_string(fam.size()) + "," + csv_number(r.defect) + "," +
                        r.source + "\n");
      return 0;
    }
    if (*witness) {
      WitnessCheck report;
      if (witness_kind == "shift" || witness_kind == "interval") {
        require(!space_text.empty() && !op_paths.empty(), "--space and --ops are required");
        const auto X = NormedSpace::parse(space_text);
        std::vector<Mat> T;
        for (const auto& p : op_paths) T.push_back(read_matrix_file(p));
        if (witness_kind == "shift") {
          const Mat psi = psi_path.empty() ? Mat(Mat::Identity(X.dim(), X.dim())) : read_matrix_file(psi_path);
          const auto w = shift_witness(T, X, psi, eps);
          std::cout << "k = " << w.spec.k << "\noutput_dim = " << w.spec.output_dim << '\n';
          report = w.report;
          if (g.break_witness) {
            const NormedSpace cod = NormedSpace::lp(1, w.spec.output_dim);
            for (std::size_t i = 0; i < T.size(); ++i)
              report.values[i] = operator_norm(w.padded[i] - w.padded[0], X, cod).value;
            report.passed = report.min_value() >= report.bound - 1e-9;
          }
        } else {
          require(!t0_path.empty(), "--t0 is required");
          const auto w = interval_witness(T, X, read_matrix_file(t0_path), eps);
          std::cout << "I_begin = " << w.spec.I_begin << "\nI_size = " << w.spec.I_size << '\n';
          report = w.report;
          if (g.break_witness) {
            const auto L = NormedSpace::discretized_l1(w.spec.grid_N);
            for (std::size_t i = 0; i < T.size(); ++i) report.values[i] = operator_norm(T[i] - T[0], X, L).value;
            report.passed = report.min_value() >= report.bound - 1e-9;
          }
        }
      } else if (witness_kind == "rankone") {
        require(!x_text.empty() && !y_text.empty() && !op_paths.empty(), "--x, --y and --ops are required");
        const auto X = NormedSpace::parse(x_text), Y = NormedSpace::parse(y_text);
        std::vector<Tensor> fam;
        for (const auto& p : op_paths) fam.emplace_back(X, Y, read_matrix_file(p));
        RankOneConfig rc;
        rc.seed = g.seed;
        rc.epsilon = eps;
        const auto w = rank_one_witness_search(fam, rc);
        std::cout << "stage1 = " << w.stage1 << "\nw = " << format_vector(w.w) << "\nz = " << format_vector(w.z) << '\n';
        report = w.report;
        if (g.break_witness) {
          for (std::size_t i = 0; i < fam.size(); ++i)
            report.values[i] = injective_value(Tensor(X, Y, fam[i].coeffs - fam[0].coeffs));
          report.passed = report.min_value() >= report.bound - 1e-9;
        }
      } else {
        require(!y_text.empty() && !matrix_path.empty() && !vector_text.empty(), "--y, --matrix and --vector are required");
        const auto Y = NormedSpace::parse(y_text);
        const Mat C = read_matrix_file(matrix_path);
        const Tensor z(NormedSpace::lp(1, static_cast<int>(C.rows())), Y, C);
        ProjectiveOptions o;
        if (g.tol > 0.0) o.tol = g.tol;
        const auto e = oplus1_extension(z, parse_vector(vector_text), o);
        const double tol = g.tol > 0.0 ? g.tol : 1e-5;
        double norm_zv = e.norm_zv;
        if (g.break_witness) {
          Mat W = e.z_ext.coeffs;
          W.row(0) += e.y.transpose();
          norm_zv = projective_norm(Tensor(e.z_ext.X, Y, W), o).value;
        }
        report.values = {norm_zv};
        report.bound = e.norm_z + 1.0;
        report.passed = std::abs(norm_zv - report.bound) <= tol && e.exactness == Exactness::Exact;
        std::cout << "norm_z = " << csv_number(e.norm_z) << "\nnorm_zv = " << csv_number(norm_zv)
                  << "\nlower = " << csv_number(e.lower) << "\nT_bar_norm = " << csv_number(e.T_bar_norm)
                  << "\nexactness = " << (e.exactness == Exactness::Exact ? "exact" : "bounds") << '\n';
      }
      std::cout << report_block(report);
      if (!g.out.empty())
        emit_csv(g, header("witness", g, "kind,value,bound,status") + witness_kind + "," +
                        csv_number(report.min_value()) + "," + csv_number(report.bound) + "," +
                        (report.passed ? "PASS" : "FAIL") + "\n");
      return report.passed ? 0 : 1;
    }
    if (*cutcone) {
      Mat D;
      std::string label = "points";
      if (!points_path.empty()) {
        require(!space_text.empty(), "--space is required with --points");
        D = distance_matrix(NormedSpace::parse(space_text), matrix_rows(read_matrix_file(points_path)));
      } else {
        require(!space_text.empty(), "--space or --points is required");
        const auto X = NormedSpace::parse(space_text);
        if (cc_mode == "search") {
          const auto s = point_config_search(X, k_points, budget, g.seed);
          std::cout << "distortion = " << csv_number(s.distortion) << "\noutcome = " << s.label()
                    << "\nevaluations = " << s.evaluations << '\n';
          for (std::size_t i = 0; i < s.points.size(); ++i)
            std::cout << "point." << i << " = " << format_vector(s.points[i]) << '\n';
          if (!g.out.empty())
            emit_csv(g, header("cutcone", g, "space,k,budget,distortion,outcome") + X.to_string() + "," +
                            std::to_string(k_points) + "," + std::to_string(budget) + "," + csv_number(s.distortion) +
                            "," + s.label() + "\n");
          return 0;
        }
        auto rng = std::mt19937_64(g.seed);
        std::vector<Vec> pts;
        for (int i = 0; i < k_points; ++i) pts.push_back(X.random_unit(rng));
        D = distance_matrix(X, pts);
        label = X.to_string();
      }
      if (cc_mode == "distortion") {
        const double t = l1_distortion_bound(D);
        std::cout << "distortion = " << csv_number(t) << '\n';
        if (!g.out.empty())
          emit_csv(g, header("cutcone", g, "source,k,distortion") + label + "," + std::to_string(D.rows()) + "," +
                          csv_number(t) + "\n");
        return 0;
      }
      const auto c = cut_cone_membership(D);
      const bool ok = verify_certificate(c);
      std::cout << format_cut_cone(c) << "verified = " << (ok ? "true" : "false") << '\n';
      if (!g.out.empty())
        emit_csv(g, header("cutcone", g, "source,k,membership,negative_type_q,status") + label + "," +
                        std::to_string(D.rows()) + "," + (c.feasible ? "feasible" : "infeasible") + "," +
                        (c.negative_type ? csv_number(c.negative_type_value) : "NA") + "," +
                        (ok ? "verified" : "FAIL certificate") + "\n");
      return ok ? 0 : 1;
    }
    if (*certify || *dichotomy) {
      ec.experiment = *certify ? "certify" : "dichotomy";
      ec.seed = g.seed;
      if (g.tol > 0.0) ec.tolerance = g.tol;
      ec.p = parse_p_list(p_list);
      ec.n = parse_int_list(n_list);
      ec.m = parse_int_list(m_list);
      ec.break_witness = g.break_witness;
      return finish(g, run_experiment(ec));
    }
    if (*run) {
      ExperimentConfig cfg = read_config_file(config_path);
      if (app.count("--seed")) cfg.seed = g.seed;
      if (g.tol > 0.0) cfg.tolerance = g.tol;
      if (g.break_witness) cfg.break_witness = true;
      if (g.out.empty()) g.out = cfg.output;
      return finish(g, run_experiment(cfg));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
