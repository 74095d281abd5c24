#ifndef NCQ_H
#define NCQ_H

/* Generated by cbindgen at build time. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define NCQ_METHOD_FDM 0

#define NCQ_METHOD_FEM 1

#define NCQ_SHAPE_GAUSSIAN 0

#define NCQ_SHAPE_LORENTZIAN 1

typedef enum NcqStatus {
  NCQ_STATUS_OK = 0,
  NCQ_STATUS_NULL_POINTER = 1,
  // Mesh, profile or parameter rejected before any computation.
  NCQ_STATUS_INVALID_ARGUMENT = 2,
  // Eigensolver failure, degenerate projection or dark detector.
  NCQ_STATUS_NUMERICAL = 3,
  // Photon state has the wrong arity, norm or dimension.
  NCQ_STATUS_INVALID_STATE = 4,
  NCQ_STATUS_BUFFER_TOO_SMALL = 5,
  NCQ_STATUS_PANIC = 6,
} NcqStatus;

// `g²` against delay for one two-photon experiment.
typedef struct NcqHomCurve NcqHomCurve;

// Mass-orthonormal Bloch mode basis of a slab cell.
typedef struct NcqModeBasis NcqModeBasis;

typedef struct NcqSlabResponse {
  double r_re;
  double r_im;
  double t_re;
  double t_im;
  double reflectance;
  double transmittance;
  // arg R − arg T in degrees.
  double phase_difference_deg;
} NcqSlabResponse;

typedef struct NcqHomParams {
  double rx;
  size_t n0;
  double eps_s;
  double rs;
  double theta0;
  // `NCQ_METHOD_FDM` or `NCQ_METHOD_FEM`.
  uint32_t method;
  double x0;
  double dx0;
  double kappa0;
  // `NCQ_SHAPE_GAUSSIAN` or `NCQ_SHAPE_LORENTZIAN`.
  uint32_t left_shape;
  uint32_t right_shape;
  // Nonzero evaluates the first intensity at the second detector.
  uint32_t literal_denominator;
  // Nonzero drops modes with negligible packet amplitude.
  uint32_t truncate_modes;
} NcqHomParams;

typedef struct NcqHomSummary {
  // `g²` at the delay closest to zero.
  double dip;
  double dip_tau;
  // Mean tail `g²`; NaN when no delay reaches the tails.
  double baseline;
  // `1 − dip/baseline`; NaN without a baseline.
  double visibility;
} NcqHomSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, static storage.
const char *ncq_version(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next failing call on the same thread.
const char *ncq_last_error_message(void);

// Normal-incidence response of a slab in vacuum.
//
// # Safety
// `out` must point to writable memory for one `NcqSlabResponse`.
enum NcqStatus ncq_slab_rt(double eps_s, double rs, double kappa, struct NcqSlabResponse *out);

// Analytic frequency (rad/s) of 0-based `band` at folded wavenumber `kappa`.
//
// # Safety
// `out` must point to a writable `double`.
enum NcqStatus ncq_band_frequency(double eps_s,
                                  double rs,
                                  double rx,
                                  double kappa,
                                  size_t band,
                                  double *out);

// Solves the cell `[-rx/2, rx/2]` with `n0` grid points and a centred slab.
//
// # Safety
// `out` must point to a writable handle slot. On success `*out` owns a basis
// that must be released with `ncq_modes_free`.
enum NcqStatus ncq_modes_solve(uint32_t method_code,
                               double rx,
                               size_t n0,
                               double eps_s,
                               double rs,
                               double theta0,
                               struct NcqModeBasis **out);

// # Safety
// `basis` must be NULL or a live handle from `ncq_modes_solve`; it is invalid afterwards.
void ncq_modes_free(struct NcqModeBasis *basis);

// Number of modes, 0 for NULL.
//
// # Safety
// `basis` must be NULL or a live handle.
size_t ncq_modes_count(const struct NcqModeBasis *basis);

// Number of unknowns (grid points minus one), 0 for NULL.
//
// # Safety
// `basis` must be NULL or a live handle.
size_t ncq_modes_dim(const struct NcqModeBasis *basis);

// Copies the ascending angular frequencies (rad/s).
//
// # Safety
// `basis` must be a live handle and `buf` valid for `len` doubles.
enum NcqStatus ncq_modes_omega(const struct NcqModeBasis *basis, double *buf, size_t len);

// Copies the wavenumber label (rad/m) of each mode.
//
// # Safety
// `basis` must be a live handle and `buf` valid for `len` doubles.
enum NcqStatus ncq_modes_kappa(const struct NcqModeBasis *basis, double *buf, size_t len);

// Copies mode `p` into separate real and imaginary buffers of `len` entries.
//
// # Safety
// `basis` must be a live handle; `re` and `im` valid for `len` doubles.
enum NcqStatus ncq_modes_vector(const struct NcqModeBasis *basis,
                                size_t p,
                                double *re,
                                double *im,
                                size_t len);

// Largest off-diagonal magnitude and diagonal deviation of `Φ†MΦ`.
//
// # Safety
// `basis` must be a live handle; both outputs must be writable.
enum NcqStatus ncq_modes_orthonormality(const struct NcqModeBasis *basis,
                                        double *max_offdiag,
                                        double *max_diag_deviation);

// Fills `out` with the slab beam-splitter defaults.
//
// # Safety
// `out` must be writable.
enum NcqStatus ncq_hom_params_default(struct NcqHomParams *out);

// Solves the modes described by `params` and sweeps the `n_tau` delays (s).
//
// # Safety
// `params` must be readable, `tau` valid for `n_tau` doubles, `out` writable.
// `*out` must be released with `ncq_hom_curve_free`.
enum NcqStatus ncq_hom_run(const struct NcqHomParams *params,
                           const double *tau,
                           size_t n_tau,
                           struct NcqHomCurve **out);

// As `ncq_hom_run` on an existing basis. The medium fields of `params`
// (`rx`, `n0`, `eps_s`, `rs`, `theta0`, `method`) are taken from the basis.
//
// # Safety
// As `ncq_hom_run`; `basis` must be a live handle.
enum NcqStatus ncq_hom_run_with_basis(const struct NcqModeBasis *basis,
                                      const struct NcqHomParams *params,
                                      const double *tau,
                                      size_t n_tau,
                                      struct NcqHomCurve **out);

// # Safety
// `curve` must be NULL or a live handle; it is invalid afterwards.
void ncq_hom_curve_free(struct NcqHomCurve *curve);

// Number of delays, 0 for NULL.
//
// # Safety
// `curve` must be NULL or a live handle.
size_t ncq_hom_curve_len(const struct NcqHomCurve *curve);

// Copies delays (s) and `g²` values, in input order.
//
// # Safety
// `curve` must be a live handle; `tau` and `g2` valid for `len` doubles.
enum NcqStatus ncq_hom_curve_points(const struct NcqHomCurve *curve,
                                    double *tau,
                                    double *g2,
                                    size_t len);

// # Safety
// `curve` must be a live handle and `out` writable.
enum NcqStatus ncq_hom_curve_summary(const struct NcqHomCurve *curve, struct NcqHomSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCQ_H */
