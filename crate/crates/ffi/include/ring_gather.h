/* C API for the ring gathering simulator and verifier. */

#ifndef RING_GATHER_H
#define RING_GATHER_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API entry point.
 */
typedef enum {
  RG_STATUS_OK = 0,
  RG_STATUS_NULL_POINTER = 1,
  RG_STATUS_INVALID_UTF8 = 2,
  RG_STATUS_INVALID_INPUT = 3,
  RG_STATUS_RUN_FAILED = 4,
  RG_STATUS_BUDGET_EXCEEDED = 5,
} RgStatus;

/**
 * An opaque simulation: a parsed scenario and, once run, its result.
 */
typedef struct RgSimulation RgSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string; do not free.
 */
const char *rg_version(void);

/**
 * Release a string allocated by this library.
 */
void rg_string_free(char *s);

/**
 * Parse a scenario JSON document into a simulation handle.
 */
RgStatus rg_simulation_new(const char *scenario_json, RgSimulation **out);

/**
 * Run the simulation to its outcome. Idempotent.
 */
RgStatus rg_simulation_run(RgSimulation *sim);

/**
 * The outcome of a finished run, as JSON.
 */
RgStatus rg_simulation_outcome_json(const RgSimulation *sim, char **out);

/**
 * The full trace of a finished run as JSON lines (header, events,
 * outcome), byte-identical to the CLI output.
 */
RgStatus rg_simulation_trace_jsonl(const RgSimulation *sim, char **out);

/**
 * Destroy a simulation handle.
 */
void rg_simulation_free(RgSimulation *sim);

/**
 * Classify a configuration against the known unsolvable families.
 * Writes the verdict as JSON.
 */
RgStatus rg_classify(uint32_t n, const uint32_t *counts, uintptr_t len, bool distinct, char **out);

/**
 * Exhaustively explore a configuration over every assignment and
 * adversarial branch. `state_budget` of 0 selects the default cap.
 * Writes the exploration result as JSON.
 */
RgStatus rg_explore(uint32_t n,
                    const uint32_t *counts,
                    uintptr_t len,
                    bool distinct,
                    uint64_t state_budget,
                    char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RING_GATHER_H */
