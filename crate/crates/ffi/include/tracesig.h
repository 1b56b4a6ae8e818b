#ifndef TRACESIG_H
#define TRACESIG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsStatus {
  TS_STATUS_OK = 0,
  // A cryptographic check failed or the operation had no result.
  TS_STATUS_REJECTED = 1,
  TS_STATUS_NULL_POINTER = 2,
  TS_STATUS_INVALID_PARAMS = 3,
  TS_STATUS_MALFORMED = 4,
  TS_STATUS_GROUP_FULL = 5,
  TS_STATUS_INTERNAL = 6,
} TsStatus;

typedef struct TsClaim TsClaim;

// Group public key together with the manager and opener keys and the registry.
typedef struct TsGroup TsGroup;

typedef struct TsMember TsMember;

typedef struct TsParams TsParams;

typedef struct TsSignature TsSignature;

typedef struct TsTrapdoor TsTrapdoor;

// A byte buffer allocated by this library; release with `ts_buffer_free`.
typedef struct TsBuffer {
  uint8_t *data;
  size_t len;
} TsBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *ts_last_error(void);

// Parameters for security level `lambda` and group size `2^l - 1`.
enum TsStatus ts_setup(size_t lambda, uint64_t group_size, struct TsParams **out);

void ts_params_free(struct TsParams *params);

enum TsStatus ts_group_keygen(const struct TsParams *params, uint64_t seed, struct TsGroup **out);

void ts_group_free(struct TsGroup *group);

// Number of members registered so far.
enum TsStatus ts_group_size(const struct TsGroup *group, uint64_t *out);

// Runs the whole join exchange for a fresh applicant.
enum TsStatus ts_group_join(struct TsGroup *group, uint64_t seed, struct TsMember **out);

uint64_t ts_member_id(const struct TsMember *member);

void ts_member_free(struct TsMember *member);

enum TsStatus ts_sign(const struct TsGroup *group,
                      const struct TsMember *member,
                      const uint8_t *msg,
                      size_t msg_len,
                      uint64_t seed,
                      struct TsSignature **out);

void ts_signature_free(struct TsSignature *sig);

enum TsStatus ts_verify(const struct TsGroup *group,
                        const uint8_t *msg,
                        size_t msg_len,
                        const struct TsSignature *sig,
                        bool *valid);

// Writes the signer's identifier, or returns `TS_STATUS_REJECTED`.
enum TsStatus ts_open(const struct TsGroup *group,
                      const uint8_t *msg,
                      size_t msg_len,
                      const struct TsSignature *sig,
                      uint64_t *id);

enum TsStatus ts_reveal(const struct TsGroup *group, uint64_t id, struct TsTrapdoor **out);

void ts_trapdoor_free(struct TsTrapdoor *trapdoor);

enum TsStatus ts_trace(const struct TsGroup *group,
                       const struct TsTrapdoor *trapdoor,
                       const struct TsSignature *sig,
                       bool *matched);

// Returns `TS_STATUS_REJECTED` when the member did not produce the signature.
enum TsStatus ts_claim(const struct TsGroup *group,
                       const struct TsMember *member,
                       const uint8_t *msg,
                       size_t msg_len,
                       const struct TsSignature *sig,
                       uint64_t seed,
                       struct TsClaim **out);

void ts_claim_free(struct TsClaim *claim);

enum TsStatus ts_claim_verify(const struct TsGroup *group,
                              const uint8_t *msg,
                              size_t msg_len,
                              const struct TsSignature *sig,
                              const struct TsClaim *claim,
                              bool *valid);

enum TsStatus ts_signature_encode(const struct TsSignature *sig, struct TsBuffer *out);

enum TsStatus ts_signature_decode(const struct TsGroup *group,
                                  const uint8_t *data,
                                  size_t len,
                                  struct TsSignature **out);

void ts_buffer_free(struct TsBuffer buffer);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRACESIG_H */
