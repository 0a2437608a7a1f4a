#ifndef PGWT_H
#define PGWT_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Euclidean distance between RGB triples.
 */
#define PGWT_DISTANCE_EUCLIDEAN 0

/**
 * CIEDE2000 difference between CIELab triples.
 */
#define PGWT_DISTANCE_CIEDE2000 1

typedef enum PgwtStatus {
  PGWT_STATUS_OK = 0,
  PGWT_STATUS_NULL_POINTER = 1,
  PGWT_STATUS_INVALID_ARGUMENT = 2,
  PGWT_STATUS_IO = 3,
  PGWT_STATUS_NUMERICAL = 4,
  PGWT_STATUS_PANIC = 5,
} PgwtStatus;

/**
 * Opaque wavelet coefficients of a color image, one set per channel.
 */
typedef struct PgwtCoefficients PgwtCoefficients;

/**
 * Opaque RGB image with channels in [0, 255].
 */
typedef struct PgwtImage PgwtImage;

/**
 * Opaque pixel graph together with its wavelet transform.
 */
typedef struct PgwtTransform PgwtTransform;

/**
 * Graph and transform settings. Start from `pgwt_graph_options_default`.
 */
typedef struct PgwtGraphOptions {
  size_t knn;
  double sigma;
  /**
   * Vertices settled per geodesic search; 0 selects 4 * knn.
   */
  size_t geo_budget;
  /**
   * One of the `PGWT_DISTANCE_*` constants.
   */
  uint32_t distance;
  size_t scales;
  /**
   * Chebyshev order; 0 selects the exact eigendecomposition.
   */
  size_t cheby_order;
} PgwtGraphOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next pgwt call on the same thread.
 */
const char *pgwt_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void pgwt_string_free(char *s);

struct PgwtGraphOptions pgwt_graph_options_default(void);

/**
 * Creates an image from interleaved 8-bit RGB bytes (`3 * width * height`).
 *
 * # Safety
 * `rgb` must point to `3 * width * height` readable bytes.
 */
enum PgwtStatus pgwt_image_from_rgb8(size_t width,
                                     size_t height,
                                     const uint8_t *rgb,
                                     struct PgwtImage **out);

/**
 * Reads a PNG or PPM file.
 *
 * # Safety
 * `path` must be a NUL-terminated string.
 */
enum PgwtStatus pgwt_image_read(const char *path, struct PgwtImage **out);

/**
 * Writes an image as PNG, rounding and clamping to 8 bits.
 *
 * # Safety
 * `image` must be a live handle and `path` a NUL-terminated string.
 */
enum PgwtStatus pgwt_image_write_png(const struct PgwtImage *image, const char *path);

/**
 * Width in pixels, or 0 for NULL.
 *
 * # Safety
 * `image` must be NULL or a live handle.
 */
size_t pgwt_image_width(const struct PgwtImage *image);

/**
 * Height in pixels, or 0 for NULL.
 *
 * # Safety
 * `image` must be NULL or a live handle.
 */
size_t pgwt_image_height(const struct PgwtImage *image);

/**
 * Copies the image out as interleaved 8-bit RGB. `len` must be at least
 * `3 * width * height`.
 *
 * # Safety
 * `image` must be a live handle and `rgb` must point to `len` writable bytes.
 */
enum PgwtStatus pgwt_image_to_rgb8(const struct PgwtImage *image, uint8_t *rgb, size_t len);

/**
 * Copies one channel (0 red, 1 green, 2 blue) as doubles in row-major order.
 *
 * # Safety
 * `image` must be a live handle and `values` must point to `len` doubles.
 */
enum PgwtStatus pgwt_image_channel(const struct PgwtImage *image,
                                   size_t channel,
                                   double *values,
                                   size_t len);

/**
 * # Safety
 * `image` must be NULL or a handle not freed before.
 */
void pgwt_image_free(struct PgwtImage *image);

/**
 * Adds seeded Gaussian noise, rounding and clamping to 8-bit values.
 *
 * # Safety
 * `image` must be a live handle.
 */
enum PgwtStatus pgwt_image_add_noise(const struct PgwtImage *image,
                                     double std,
                                     uint64_t seed,
                                     struct PgwtImage **out);

/**
 * Builds the pixel graph of `image` and its wavelet transform.
 *
 * # Safety
 * `image` and `options` must be valid pointers.
 */
enum PgwtStatus pgwt_transform_build(const struct PgwtImage *image,
                                     const struct PgwtGraphOptions *options,
                                     struct PgwtTransform **out);

/**
 * # Safety
 * `transform` must be NULL or a live handle.
 */
size_t pgwt_transform_vertex_count(const struct PgwtTransform *transform);

/**
 * # Safety
 * `transform` must be NULL or a live handle.
 */
size_t pgwt_transform_edge_count(const struct PgwtTransform *transform);

/**
 * Upper end of the spectral interval used by the transform, or 0 for NULL.
 *
 * # Safety
 * `transform` must be NULL or a live handle.
 */
double pgwt_transform_lambda_max(const struct PgwtTransform *transform);

/**
 * Copies the edge list. Each array must hold `capacity` entries and
 * `capacity` must be at least the edge count.
 *
 * # Safety
 * `transform` must be a live handle; `a`, `b`, `w` must point to
 * `capacity` writable entries.
 */
enum PgwtStatus pgwt_transform_edges(const struct PgwtTransform *transform,
                                     size_t *a,
                                     size_t *b,
                                     double *w,
                                     size_t capacity);

/**
 * Channel-averaged quadratic form sqrt(f^T L f) of `image` on the graph.
 *
 * # Safety
 * `transform` and `image` must be live handles.
 */
enum PgwtStatus pgwt_transform_quadratic_form(const struct PgwtTransform *transform,
                                              const struct PgwtImage *image,
                                              double *q);

/**
 * Forward transform of all three channels.
 *
 * # Safety
 * `transform` and `image` must be live handles.
 */
enum PgwtStatus pgwt_transform_decompose(const struct PgwtTransform *transform,
                                         const struct PgwtImage *image,
                                         struct PgwtCoefficients **out);

/**
 * # Safety
 * `transform` must be NULL or a handle not freed before.
 */
void pgwt_transform_free(struct PgwtTransform *transform);

/**
 * Number of planes per channel (scaling plane plus one per scale).
 *
 * # Safety
 * `coeffs` must be NULL or a live handle.
 */
size_t pgwt_coefficients_plane_count(const struct PgwtCoefficients *coeffs);

/**
 * Copies plane `plane` (0 is the scaling plane) of `channel`.
 *
 * # Safety
 * `coeffs` must be a live handle and `values` must point to `len` doubles.
 */
enum PgwtStatus pgwt_coefficients_plane(const struct PgwtCoefficients *coeffs,
                                        size_t channel,
                                        size_t plane,
                                        double *values,
                                        size_t len);

/**
 * # Safety
 * `coeffs` must be NULL or a handle not freed before.
 */
void pgwt_coefficients_free(struct PgwtCoefficients *coeffs);

/**
 * Denoises `noisy`. If `report_json` is not NULL it receives the JSON
 * report, to be released with `pgwt_string_free`.
 *
 * # Safety
 * `noisy` must be a live handle and `options` a valid pointer.
 */
enum PgwtStatus pgwt_denoise(const struct PgwtImage *noisy,
                             const struct PgwtGraphOptions *options,
                             double smooth_sigma,
                             double threshold_mult,
                             struct PgwtImage **out,
                             char **report_json);

/**
 * Inpaints the pixels where `known[i] == 0`, with the threshold set to
 * `threshold_mult` times the estimated noise level. Observed pixels are
 * copied unchanged.
 *
 * # Safety
 * `attacked` must be a live handle, `known` must point to `width * height`
 * bytes and `options` must be a valid pointer.
 */
enum PgwtStatus pgwt_inpaint(const struct PgwtImage *attacked,
                             const uint8_t *known,
                             const struct PgwtGraphOptions *options,
                             size_t iterations,
                             double threshold_mult,
                             struct PgwtImage **out,
                             char **report_json);

/**
 * Per-channel power-ratio SNR in dB. A perfect match gives +infinity.
 *
 * # Safety
 * Both images must be live handles and `snr` must point to 3 doubles.
 */
enum PgwtStatus pgwt_snr(const struct PgwtImage *reference,
                         const struct PgwtImage *test,
                         double *snr);

/**
 * SSIM of the HSV Value planes.
 *
 * # Safety
 * Both images must be live handles.
 */
enum PgwtStatus pgwt_ssim(const struct PgwtImage *reference,
                          const struct PgwtImage *test,
                          double *ssim);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PGWT_H */
