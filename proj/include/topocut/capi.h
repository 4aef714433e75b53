#ifndef TOPOCUT_CAPI_H
#define TOPOCUT_CAPI_H

/* C interface to the cut/solve pipeline. All objects are opaque; every
 * function returns a status code and reports details via tc_last_error().
 * Strings returned through out parameters are owned by the caller and must
 * be released with tc_string_free(). */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  TC_OK = 0,
  TC_ERR_PARSE = 2,    /* malformed input document or unknown scene */
  TC_ERR_TOPOLOGY = 3, /* topological precondition violated */
  TC_ERR_VERIFY = 4,   /* cut set failed verification */
  TC_ERR_SOLVER = 5,   /* assembly or linear solve failed */
  TC_ERR_ARGUMENT = 6  /* null pointer or out-of-range argument */
} tc_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* tc_last_error(void);

void tc_string_free(char* s);

/* ---- model: mesh + cell skeleton + region labeling -------------------- */

typedef struct tc_model tc_model;

tc_status tc_model_from_mesh_json(const char* json, tc_model** out);
tc_status tc_model_from_scene(const char* scene, int resolution, tc_model** out);
void tc_model_free(tc_model* m);

/* cwmesh-1 document of a built-in scene, without building the skeleton. */
tc_status tc_scene_mesh_json(const char* scene, int resolution, char** out_json);

/* Comma-separated scene names. */
tc_status tc_scene_names(char** out_names);

/* region: 0 = whole complex, 1 = conductor, 2 = insulator.
 * oracle != 0 recomputes by full Smith Normal Form and fails with
 * TC_ERR_TOPOLOGY if the reduced path disagrees.
 * betti_out receives beta_0..beta_3; torsion_free_out is 1 when every
 * homology group is free. */
tc_status tc_betti(const tc_model* m, int region, int oracle, int betti_out[4], int* torsion_free_out);

/* ---- cuts ------------------------------------------------------------- */

typedef struct tc_cutset tc_cutset;

tc_status tc_compute_cuts(const tc_model* m, tc_cutset** out);
tc_status tc_cutset_from_json(const char* json, tc_cutset** out);
tc_status tc_cutset_to_json(const tc_cutset* cs, char** out_json);
int tc_cutset_count(const tc_cutset* cs); /* -1 on NULL */
void tc_cutset_free(tc_cutset* cs);

/* TC_OK when all invariants hold; TC_ERR_VERIFY otherwise, with the failed
 * invariants listed one per line in *report_out (also filled on success). */
tc_status tc_verify_cuts(const tc_model* m, const tc_cutset* cs, int trials, unsigned seed, char** report_out);

/* ---- solve ------------------------------------------------------------ */

/* source_kind: 0 = prescribed current (ampere), 1 = prescribed e.m.f.
 * (volt). Writes the solution document (currents, residual table, degrees
 * of freedom) to *solution_json_out. */
tc_status tc_solve(const tc_model* m, const tc_cutset* cs, double mu, double rho, double omega_rad_s,
                   int source_kind, int source_cut, double value_re, double value_im,
                   char** solution_json_out);

#ifdef __cplusplus
}
#endif

#endif /* TOPOCUT_CAPI_H */
