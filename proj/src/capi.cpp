#include "topocut/capi.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "topocut/cuts.hpp"
#include "topocut/homology.hpp"
#include "topocut/mesh.hpp"
#include "topocut/scenes.hpp"
#include "topocut/solver.hpp"

using namespace topocut;

struct tc_model {
  Skeleton sk;
};

struct tc_cutset {
  CutSet cs;
};

namespace {

thread_local std::string g_error = "ok";

tc_status fail(tc_status code, const std::string& msg) {
  g_error = msg;
  return code;
}

template <typename Fn>
tc_status guard(Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    return fail(TC_ERR_PARSE, e.what());
  } catch (const TopologyError& e) {
    return fail(TC_ERR_TOPOLOGY, e.what());
  } catch (const SolverError& e) {
    return fail(TC_ERR_SOLVER, e.what());
  } catch (const std::exception& e) {
    return fail(TC_ERR_ARGUMENT, e.what());
  }
}

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

}  // namespace

extern "C" {

const char* tc_last_error(void) { return g_error.c_str(); }

void tc_string_free(char* s) { std::free(s); }

tc_status tc_model_from_mesh_json(const char* json, tc_model** out) {
  if (!json || !out) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    auto m = new tc_model{build_skeleton(parse_mesh(json))};
    *out = m;
    return TC_OK;
  });
}

tc_status tc_model_from_scene(const char* scene, int resolution, tc_model** out) {
  if (!scene || !out) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    auto m = new tc_model{build_skeleton(generate_scene(scene, resolution))};
    *out = m;
    return TC_OK;
  });
}

void tc_model_free(tc_model* m) { delete m; }

tc_status tc_scene_mesh_json(const char* scene, int resolution, char** out_json) {
  if (!scene || !out_json) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    *out_json = copy_out(serialize_mesh(generate_scene(scene, resolution)));
    return TC_OK;
  });
}

tc_status tc_scene_names(char** out_names) {
  if (!out_names) return fail(TC_ERR_ARGUMENT, "null argument");
  std::string all;
  for (const std::string& n : scene_names()) {
    if (!all.empty()) all += ",";
    all += n;
  }
  *out_names = copy_out(all);
  return TC_OK;
}

tc_status tc_betti(const tc_model* m, int region, int oracle, int betti_out[4], int* torsion_free_out) {
  if (!m || !betti_out) return fail(TC_ERR_ARGUMENT, "null argument");
  if (region < 0 || region > 2) return fail(TC_ERR_ARGUMENT, "region must be 0, 1 or 2");
  return guard([&] {
    BettiTable table;
    auto compute = [&](const ChainComplex& cx) {
      table = betti_reduced(cx);
      if (oracle && !(table == betti_oracle(cx)))
        throw TopologyError("reduced Betti computation disagrees with the Smith Normal Form oracle");
    };
    if (region == 0) {
      compute(m->sk.complex);
    } else {
      const SubcomplexView& view = region == 1 ? m->sk.regions.conductor : m->sk.regions.insulator;
      compute(restrict_complex(m->sk.complex, view).complex);
    }
    bool torsion_free = true;
    for (int d = 0; d <= ChainComplex::kMaxDim; ++d) {
      betti_out[d] = table.betti[static_cast<std::size_t>(d)];
      torsion_free = torsion_free && table.torsion[static_cast<std::size_t>(d)].empty();
    }
    if (torsion_free_out) *torsion_free_out = torsion_free ? 1 : 0;
    return TC_OK;
  });
}

tc_status tc_compute_cuts(const tc_model* m, tc_cutset** out) {
  if (!m || !out) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    auto cs = new tc_cutset{compute_cuts(m->sk.complex, m->sk.regions)};
    *out = cs;
    return TC_OK;
  });
}

tc_status tc_cutset_from_json(const char* json, tc_cutset** out) {
  if (!json || !out) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    auto cs = new tc_cutset{parse_cutset(json)};
    *out = cs;
    return TC_OK;
  });
}

tc_status tc_cutset_to_json(const tc_cutset* cs, char** out_json) {
  if (!cs || !out_json) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    *out_json = copy_out(serialize_cutset(cs->cs));
    return TC_OK;
  });
}

int tc_cutset_count(const tc_cutset* cs) { return cs ? cs->cs.n : -1; }

void tc_cutset_free(tc_cutset* cs) { delete cs; }

tc_status tc_verify_cuts(const tc_model* m, const tc_cutset* cs, int trials, unsigned seed, char** report_out) {
  if (!m || !cs) return fail(TC_ERR_ARGUMENT, "null argument");
  return guard([&] {
    // chains referencing cells outside the model cannot be fed to the
    // verifier; treat the mismatch as a verification failure, not a crash
    int n_edges = m->sk.complex.cell_count(1);
    for (const auto& chains : {&cs->cs.cuts, &cs->cs.loops})
      for (const IntChain& c : *chains)
        for (const auto& [id, v] : c.coeffs)
          if (id < 0 || id >= n_edges) {
            std::string msg = "cut set references edges outside this model";
            if (report_out) *report_out = copy_out(msg);
            return fail(TC_ERR_VERIFY, msg);
          }
    VerifyReport r = verify_cutset(cs->cs, m->sk.complex, m->sk.regions, trials, seed);
    std::string text = r.ok ? "ok" : "";
    for (const std::string& f : r.failures) {
      if (!text.empty()) text += "\n";
      text += f;
    }
    if (report_out) *report_out = copy_out(text);
    return r.ok ? TC_OK : fail(TC_ERR_VERIFY, "cut set failed verification:\n" + text);
  });
}

tc_status tc_solve(const tc_model* m, const tc_cutset* cs, double mu, double rho, double omega_rad_s,
                   int source_kind, int source_cut, double value_re, double value_im,
                   char** solution_json_out) {
  if (!m || !cs || !solution_json_out) return fail(TC_ERR_ARGUMENT, "null argument");
  if (source_kind != 0 && source_kind != 1) return fail(TC_ERR_ARGUMENT, "source kind must be 0 or 1");
  return guard([&] {
    Constitutive mats = build_constitutive(m->sk, MaterialParams{mu, rho});
    SourceSpec src;
    src.kind = source_kind == 0 ? SourceSpec::Kind::Current : SourceSpec::Kind::Emf;
    src.cut_index = source_cut;
    src.value = Complex{value_re, value_im};
    TOmegaSystem sys = assemble(m->sk, cs->cs, mats, omega_rad_s, src);
    FieldSolution sol = solve(sys, m->sk, cs->cs, mats);
    LawReport laws = check_laws(sol, m->sk, cs->cs, mats, omega_rad_s, source_cut);
    *solution_json_out = copy_out(serialize_solution(sol, sys, laws));
    return TC_OK;
  });
}

}  // extern "C"
