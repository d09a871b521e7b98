#ifndef PCH_H
#define PCH_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PchError {
  PCH_ERROR_OK = 0,
  PCH_ERROR_NULL_POINTER = 1,
  PCH_ERROR_PARSE = 2,
  PCH_ERROR_ENCODE = 3,
  PCH_ERROR_MITER = 4,
  PCH_ERROR_RESOURCE_LIMIT = 5,
  PCH_ERROR_INTERNAL = 6,
} PchError;

typedef enum PchProveResult {
  PCH_PROVE_RESULT_PROVED = 0,
  PCH_PROVE_RESULT_COUNTEREXAMPLE = 1,
} PchProveResult;

typedef enum PchStrategy {
  PCH_STRATEGY_SPLIT = 0,
  PCH_STRATEGY_TSEITIN = 1,
} PchStrategy;

typedef enum PchVerdict {
  PCH_VERDICT_VALID = 0,
  PCH_VERDICT_INVALID = 1,
  PCH_VERDICT_REJECTED = 2,
} PchVerdict;

/**
 * Parsed or generated certificate.
 */
typedef struct PchCertificate PchCertificate;

/**
 * Parsed circuit.
 */
typedef struct PchCircuit PchCircuit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *pch_last_error_message(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void pch_string_free(char *s);

/**
 * Parses an ASCII or binary AIGER file image.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PchError pch_circuit_parse(const uint8_t *data, uintptr_t len, struct PchCircuit **out);

/**
 * # Safety
 * `circuit` must be NULL or a live handle from this library.
 */
void pch_circuit_free(struct PchCircuit *circuit);

/**
 * Number of latches, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
uintptr_t pch_circuit_num_latches(const struct PchCircuit *circuit);

/**
 * ASCII AIGER text of the circuit; free with [`pch_string_free`].
 *
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum PchError pch_circuit_write_ascii(const struct PchCircuit *circuit, char **out);

/**
 * Equivalence miter of two circuits.
 *
 * # Safety
 * `spec` and `implementation` must be live handles; `out` must be writable.
 */
enum PchError pch_miter(const struct PchCircuit *spec,
                        const struct PchCircuit *implementation,
                        struct PchCircuit **out);

/**
 * Runs IC3 on the selected safety bit. On `PCH_PROVE_RESULT_PROVED` a
 * certificate bound to the circuit's digest is stored in `out_cert`; on
 * `PCH_PROVE_RESULT_COUNTEREXAMPLE` the AIGER witness text is stored in
 * `out_witness` when that pointer is non-NULL. A `time_limit_ms` of 0
 * means no limit.
 *
 * # Safety
 * `circuit` must be a live handle; `out_result` and `out_cert` must be
 * writable; `out_witness` may be NULL.
 */
enum PchError pch_prove(const struct PchCircuit *circuit,
                        uintptr_t safety_index,
                        uint64_t time_limit_ms,
                        enum PchProveResult *out_result,
                        struct PchCertificate **out_cert,
                        char **out_witness);

/**
 * Parses a certificate file image.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PchError pch_certificate_parse(const uint8_t *data,
                                    uintptr_t len,
                                    struct PchCertificate **out);

/**
 * Certificate file text; free with [`pch_string_free`].
 *
 * # Safety
 * `cert` must be a live handle; `out` must be writable.
 */
enum PchError pch_certificate_write(const struct PchCertificate *cert, char **out);

/**
 * Number of clauses, or 0 for NULL.
 *
 * # Safety
 * `cert` must be NULL or a live handle.
 */
uintptr_t pch_certificate_num_clauses(const struct PchCertificate *cert);

/**
 * # Safety
 * `cert` must be NULL or a live handle from this library.
 */
void pch_certificate_free(struct PchCertificate *cert);

/**
 * Runs the three validation queries. `check_digest` nonzero rejects
 * certificates stamped for a different circuit. `out_query_us` may be NULL;
 * otherwise it receives the summed query time in microseconds.
 *
 * # Safety
 * `circuit` and `cert` must be live handles; `out_verdict` must be
 * writable.
 */
enum PchError pch_validate(const struct PchCircuit *circuit,
                           const struct PchCertificate *cert,
                           uintptr_t safety_index,
                           enum PchStrategy strategy,
                           int32_t check_digest,
                           enum PchVerdict *out_verdict,
                           uint64_t *out_query_us);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCH_H */
