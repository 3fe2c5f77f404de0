#ifndef CONTACT_ANALOGY_H
#define CONTACT_ANALOGY_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CaStatus {
  CA_STATUS_OK = 0,
  /**
   * No geometric match exists.
   */
  CA_STATUS_NO_CANDIDATES = 1,
  /**
   * Matches exist but none passed verification.
   */
  CA_STATUS_NOT_VERIFIED = 2,
  /**
   * Unreadable or malformed input.
   */
  CA_STATUS_INPUT = 3,
  /**
   * Null pointer or out-of-range argument.
   */
  CA_STATUS_INVALID_ARGUMENT = 4,
  /**
   * The engine panicked; the handle involved should be dropped.
   */
  CA_STATUS_INTERNAL = 5,
} CaStatus;

typedef enum CaSign {
  CA_SIGN_CONVEX = 0,
  CA_SIGN_CONCAVE = 1,
  CA_SIGN_FLAT = 2,
} CaSign;

/**
 * Result of matching a scene.
 */
typedef struct CaReport CaReport;

/**
 * A scene file with every referenced mask and trajectory loaded.
 */
typedef struct CaScene CaScene;

/**
 * Selected contact pair of a report.
 */
typedef struct CaContact {
  double tool_x;
  double tool_y;
  double object_x;
  double object_y;
  double combined;
  uint32_t rank;
  bool verified;
} CaContact;

/**
 * Curvature at one contour point, from the multiscale estimator.
 */
typedef struct CaCurvature {
  double x;
  double y;
  double radius;
  double kappa;
  enum CaSign sign;
  double normal_x;
  double normal_y;
  double scale;
} CaCurvature;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library from the same thread.
 */
const char *ca_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ca_version(void);

/**
 * Loads a scene file. With `fallback_features` every feature stem is
 * replaced by built-in shape descriptors.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CaStatus ca_scene_load(const char *path, bool fallback_features, struct CaScene **out);

/**
 * # Safety
 * `scene` must come from [`ca_scene_load`] and not be used afterwards.
 */
void ca_scene_free(struct CaScene *scene);

/**
 * Number of targets in the scene, 0 for a null handle.
 *
 * # Safety
 * `scene` must be null or a live handle.
 */
size_t ca_scene_target_count(const struct CaScene *scene);

/**
 * Matches the scene's first target and verifies its candidates.
 *
 * # Safety
 * `scene` must be a live handle and `out` a valid pointer.
 */
enum CaStatus ca_match(const struct CaScene *scene, struct CaReport **out);

/**
 * # Safety
 * `report` must come from [`ca_match`] and not be used afterwards.
 */
void ca_report_free(struct CaReport *report);

/**
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum CaStatus ca_report_contact(const struct CaReport *report, struct CaContact *out);

/**
 * The full report as JSON. Release the string with [`ca_string_free`].
 *
 * # Safety
 * `report` must be a live handle and `out` a valid pointer.
 */
enum CaStatus ca_report_json(const struct CaReport *report, char **out);

/**
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ca_string_free(char *s);

/**
 * Estimates curvature near `(x, y)` on a row-major `width × height` mask
 * where nonzero bytes are foreground. Uses the default pyramid, α and Δ.
 *
 * # Safety
 * `pixels` must point to `width * height` bytes and `out` be valid.
 */
enum CaStatus ca_estimate_curvature(const uint8_t *pixels,
                                    size_t width,
                                    size_t height,
                                    double x,
                                    double y,
                                    struct CaCurvature *out);

/**
 * Writes a seeded synthetic suite of `count` scenes to `out_dir`.
 *
 * # Safety
 * `out_dir` must be a NUL-terminated string.
 */
enum CaStatus ca_gen_suite(uint64_t seed, size_t count, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONTACT_ANALOGY_H */
