#ifndef KINOPAX_H
#define KINOPAX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum KpxStatus {
  KPX_STATUS_OK = 0,
  KPX_STATUS_NULL_POINTER = 1,
  KPX_STATUS_INVALID_UTF8 = 2,
  KPX_STATUS_SCHEMA = 3,
  KPX_STATUS_UNKNOWN_SCENARIO = 4,
  KPX_STATUS_INVALID_PROBLEM = 5,
  KPX_STATUS_INVALID_CONFIG = 6,
  KPX_STATUS_IO = 7,
  KPX_STATUS_BUFFER_TOO_SMALL = 8,
  KPX_STATUS_NO_SOLUTION = 9,
  KPX_STATUS_INTERNAL = 10,
} KpxStatus;

// The outcome of one planning run.
typedef struct KpxResult KpxResult;

// A loaded scenario: problem, planner configuration and trial settings.
typedef struct KpxScenario KpxScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or null if none. The pointer
// stays valid until the next failing call on this thread.
const char *kpx_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *kpx_version(void);

// Parses a scenario document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum KpxStatus kpx_scenario_from_json(const char *json, struct KpxScenario **out);

// Loads a bundled scenario by name or a scenario file by path.
//
// # Safety
// `name_or_path` must be a NUL-terminated string and `out` a valid pointer.
enum KpxStatus kpx_scenario_load(const char *name_or_path, struct KpxScenario **out);

// Releases a scenario. Null is ignored.
//
// # Safety
// `scenario` must come from this library and not be used afterwards.
void kpx_scenario_free(struct KpxScenario *scenario);

// # Safety
// `scenario` must be a live handle.
enum KpxStatus kpx_scenario_set_seed(struct KpxScenario *scenario, uint64_t seed);

// Sets the worker thread count; must be at least 1.
//
// # Safety
// `scenario` must be a live handle.
enum KpxStatus kpx_scenario_set_workers(struct KpxScenario *scenario, size_t workers);

// Wall-clock budget in milliseconds; 0 removes it.
//
// # Safety
// `scenario` must be a live handle.
enum KpxStatus kpx_scenario_set_time_limit_ms(struct KpxScenario *scenario, uint64_t ms);

// Iteration budget; 0 removes it.
//
// # Safety
// `scenario` must be a live handle.
enum KpxStatus kpx_scenario_set_max_iterations(struct KpxScenario *scenario, uint64_t n);

// Propagation budget; 0 removes it.
//
// # Safety
// `scenario` must be a live handle.
enum KpxStatus kpx_scenario_set_max_propagations(struct KpxScenario *scenario, uint64_t n);

// State dimension of the scenario's model, or 0 for a null handle.
//
// # Safety
// `scenario` must be null or a live handle.
size_t kpx_scenario_state_dim(const struct KpxScenario *scenario);

// Runs the planner. A run that finds no solution still succeeds; check
// [`kpx_result_success`].
//
// # Safety
// `scenario` must be a live handle and `out` a valid pointer.
enum KpxStatus kpx_plan(const struct KpxScenario *scenario, struct KpxResult **out);

// Releases a result. Null is ignored.
//
// # Safety
// `result` must come from this library and not be used afterwards.
void kpx_result_free(struct KpxResult *result);

// # Safety
// `result` must be null or a live handle.
bool kpx_result_success(const struct KpxResult *result);

// Best solution cost; +infinity when no solution was found.
//
// # Safety
// `result` must be null or a live handle.
double kpx_result_cost(const struct KpxResult *result);

// # Safety
// `result` must be null or a live handle.
uint64_t kpx_result_iterations(const struct KpxResult *result);

// Number of nodes in the final tree.
//
// # Safety
// `result` must be null or a live handle.
size_t kpx_result_node_count(const struct KpxResult *result);

// # Safety
// `result` must be null or a live handle.
size_t kpx_result_state_dim(const struct KpxResult *result);

// Number of states on the solution trajectory, 0 without a solution.
//
// # Safety
// `result` must be null or a live handle.
size_t kpx_result_state_count(const struct KpxResult *result);

// Copies the trajectory states row-major into `buf`, which must hold
// `state_count * state_dim` doubles.
//
// # Safety
// `result` must be a live handle and `buf` valid for `len` writes.
enum KpxStatus kpx_result_copy_states(const struct KpxResult *result, double *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KINOPAX_H */
