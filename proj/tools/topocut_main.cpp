#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "topocut/capi.h"

namespace {

constexpr int kExitUsage = 2;

int exit_code(tc_status s) { return s == TC_ERR_ARGUMENT ? kExitUsage : static_cast<int>(s); }

int report_failure(tc_status s) {
  std::cerr << "error: " << tc_last_error() << "\n";
  return exit_code(s);
}

struct ModelGuard {
  tc_model* m = nullptr;
  ~ModelGuard() { tc_model_free(m); }
};

struct CutsGuard {
  tc_cutset* c = nullptr;
  ~CutsGuard() { tc_cutset_free(c); }
};

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { tc_string_free(s); }
};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  return true;
}

struct ModelInput {
  std::string in_path;
  std::string scene;
  int resolution = 0;

  void attach(CLI::App* cmd) {
    auto* in = cmd->add_option("--in", in_path, "cwmesh-1 JSON input file");
    auto* sc = cmd->add_option("--scene", scene, "built-in scene name");
    auto* rs = cmd->add_option("--res", resolution, "scene resolution");
    in->excludes(sc);
    sc->needs(rs);
    rs->needs(sc);
  }

  tc_status load(tc_model** out) const {
    if (!scene.empty()) return tc_model_from_scene(scene.c_str(), resolution, out);
    if (in_path.empty()) {
      std::cerr << "error: provide --in or --scene/--res\n";
      return TC_ERR_ARGUMENT;
    }
    std::string text;
    if (!read_file(in_path, text)) return TC_ERR_PARSE;
    return tc_model_from_mesh_json(text.c_str(), out);
  }
};

tc_status load_cuts(const std::string& path, const tc_model* model, tc_cutset** out) {
  if (path.empty()) return tc_compute_cuts(model, out);
  std::string text;
  if (!read_file(path, text)) return TC_ERR_PARSE;
  return tc_cutset_from_json(text.c_str(), out);
}

int threads_from_env() {
  const char* env = std::getenv("TOPOCUT_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (!end || *end != '\0' || v < 1) return -1;
  return static_cast<int>(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cell-complex cuts and T-Omega eddy current solver"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "write the mesh of a built-in scene");
  std::string gen_scene, gen_out;
  int gen_res = 0;
  gen->add_option("--scene", gen_scene, "scene name")->required();
  gen->add_option("--res", gen_res, "resolution")->required();
  gen->add_option("--out", gen_out, "output file (default stdout)");

  // betti
  auto* betti = app.add_subcommand("betti", "Betti numbers of the complex and both regions");
  ModelInput betti_in;
  betti_in.attach(betti);
  bool betti_oracle = false;
  betti->add_flag("--oracle", betti_oracle, "cross-check against the full Smith Normal Form path");

  // cuts
  auto* cuts = app.add_subcommand("cuts", "compute the cut set of the insulating region");
  ModelInput cuts_in;
  cuts_in.attach(cuts);
  std::string cuts_out;
  cuts->add_option("--out", cuts_out, "cut JSON output file (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "check the invariants of a cut file");
  ModelInput verify_in;
  verify_in.attach(verify);
  std::string verify_cuts_path;
  int verify_trials = 3;
  unsigned verify_seed = 0;
  verify->add_option("--cuts", verify_cuts_path, "cut JSON file")->required();
  verify->add_option("--trials", verify_trials, "random homologous perturbations per loop");
  verify->add_option("--seed", verify_seed, "perturbation seed");

  // solve
  auto* solve = app.add_subcommand("solve", "assemble and solve the frequency-domain system");
  ModelInput solve_in;
  solve_in.attach(solve);
  std::string solve_cuts_path, solve_out;
  double mu = 1.25663706212e-6, rho = 1.68e-8, freq = 50.0;
  double current = 1.0, emf = 0.0;
  int source_cut = 0;
  solve->add_option("--cuts", solve_cuts_path, "cut JSON file (default: computed in process)");
  solve->add_option("--mu", mu, "permeability, henry/meter");
  solve->add_option("--rho", rho, "conductor resistivity, ohm meter");
  solve->add_option("--freq", freq, "frequency, hertz");
  auto* cur_opt = solve->add_option("--current", current, "prescribed current, ampere");
  auto* emf_opt = solve->add_option("--emf", emf, "prescribed e.m.f., volt");
  cur_opt->excludes(emf_opt);
  solve->add_option("--cut", source_cut, "driven cut index");
  solve->add_option("--out", solve_out, "solution JSON output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (threads_from_env() < 0) {
    std::cerr << "error: TOPOCUT_THREADS must be a positive integer\n";
    return kExitUsage;
  }
  // every stage currently runs one job; the variable caps future parallelism

  if (gen->parsed()) {
    StringGuard json;
    tc_status s = tc_scene_mesh_json(gen_scene.c_str(), gen_res, &json.s);
    if (s != TC_OK) return report_failure(s);
    return write_output(gen_out, json.s) ? 0 : 1;
  }

  if (betti->parsed()) {
    ModelGuard model;
    tc_status s = betti_in.load(&model.m);
    if (s != TC_OK) return report_failure(s);
    static const char* kLabel[3] = {"complex  ", "conductor", "insulator"};
    for (int region = 0; region < 3; ++region) {
      int b[4] = {0, 0, 0, 0};
      int torsion_free = 0;
      s = tc_betti(model.m, region, betti_oracle ? 1 : 0, b, &torsion_free);
      if (s != TC_OK) return report_failure(s);
      std::cout << kLabel[region] << "  b0=" << b[0] << " b1=" << b[1] << " b2=" << b[2] << " b3=" << b[3]
                << (torsion_free ? "  torsion-free" : "  TORSION") << "\n";
    }
    return 0;
  }

  if (cuts->parsed()) {
    ModelGuard model;
    tc_status s = cuts_in.load(&model.m);
    if (s != TC_OK) return report_failure(s);
    CutsGuard cs;
    s = tc_compute_cuts(model.m, &cs.c);
    if (s != TC_OK) return report_failure(s);
    StringGuard json;
    s = tc_cutset_to_json(cs.c, &json.s);
    if (s != TC_OK) return report_failure(s);
    std::cerr << "cuts: " << tc_cutset_count(cs.c) << "\n";
    return write_output(cuts_out, json.s) ? 0 : 1;
  }

  if (verify->parsed()) {
    ModelGuard model;
    tc_status s = verify_in.load(&model.m);
    if (s != TC_OK) return report_failure(s);
    CutsGuard cs;
    s = load_cuts(verify_cuts_path, model.m, &cs.c);
    if (s != TC_OK) return report_failure(s);
    StringGuard report;
    s = tc_verify_cuts(model.m, cs.c, verify_trials, verify_seed, &report.s);
    std::cout << (report.s ? report.s : "") << "\n";
    if (s != TC_OK) {
      std::cerr << "error: cut verification failed\n";
      return exit_code(s);
    }
    return 0;
  }

  if (solve->parsed()) {
    ModelGuard model;
    tc_status s = solve_in.load(&model.m);
    if (s != TC_OK) return report_failure(s);
    CutsGuard cs;
    s = load_cuts(solve_cuts_path, model.m, &cs.c);
    if (s != TC_OK) return report_failure(s);
    bool use_emf = emf_opt->count() > 0;
    double value = use_emf ? emf : current;
    double omega = 2.0 * M_PI * freq;
    StringGuard json;
    s = tc_solve(model.m, cs.c, mu, rho, omega, use_emf ? 1 : 0, source_cut, value, 0.0, &json.s);
    if (s != TC_OK) return report_failure(s);
    return write_output(solve_out, json.s) ? 0 : 1;
  }

  return kExitUsage;
}
