/*
 * xmaps — event-camera structured-light depth estimation.
 *
 * C API over the core pipeline: event stream filtering, frame triggering,
 * time-map calibration, X-map construction, per-event disparity lookup,
 * a brute-force disparity oracle, a scan simulator, and evaluation metrics.
 *
 * Conventions:
 *  - Every function returns xm_status; XM_OK is 0. On failure,
 *    xm_error_message() returns a thread-local description of the last
 *    error raised on the calling thread.
 *  - Objects are opaque handles created through xm_*_create/read/compute
 *    functions and released with the matching xm_*_free. Handles are
 *    immutable after creation and safe to share across threads for reads.
 *  - Timestamps are integer microseconds. Image grids are row-major.
 */

#ifndef XMAPS_XMAPS_H
#define XMAPS_XMAPS_H

#include <stddef.h>
#include <stdint.h>

#if defined(XM_BUILD_SHARED)
#define XM_API __attribute__((visibility("default")))
#else
#define XM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xm_status {
  XM_OK = 0,
  XM_ERR_INVALID_ARGUMENT = 1,
  XM_ERR_DEGENERATE = 2,
  XM_ERR_DIMENSION_MISMATCH = 3,
  XM_ERR_OUT_OF_BOUNDS = 4,
  XM_ERR_EMPTY_INPUT = 5,
  XM_ERR_IO = 6,
  XM_ERR_BAD_MAGIC = 7,
  XM_ERR_TRUNCATED = 8,
  XM_ERR_UNSORTED = 9,
  XM_ERR_BAD_FORMAT = 10,
  XM_ERR_INTERNAL = 11
} xm_status;

XM_API const char* xm_version(void);
XM_API const char* xm_status_name(xm_status status);
/* Thread-local message of the last failing call on this thread. */
XM_API const char* xm_error_message(void);

/* ------------------------------------------------------------------ */
/* Opaque handles                                                      */

typedef struct xm_events xm_events;
typedef struct xm_calib xm_calib;
typedef struct xm_rectmap xm_rectmap;
typedef struct xm_timemap xm_timemap;
typedef struct xm_xmap xm_xmap;
typedef struct xm_depth_frame xm_depth_frame;
typedef struct xm_disparity_map xm_disparity_map;
typedef struct xm_depth_image xm_depth_image;
typedef struct xm_sim xm_sim;

XM_API void xm_events_free(xm_events* h);
XM_API void xm_calib_free(xm_calib* h);
XM_API void xm_rectmap_free(xm_rectmap* h);
XM_API void xm_timemap_free(xm_timemap* h);
XM_API void xm_xmap_free(xm_xmap* h);
XM_API void xm_depth_frame_free(xm_depth_frame* h);
XM_API void xm_disparity_map_free(xm_disparity_map* h);
XM_API void xm_depth_image_free(xm_depth_image* h);
XM_API void xm_sim_free(xm_sim* h);

/* ------------------------------------------------------------------ */
/* Events                                                              */

typedef struct xm_event {
  uint64_t t_us;
  uint16_t x;
  uint16_t y;
  uint8_t polarity; /* 1 = positive, 0 = negative */
} xm_event;

typedef enum xm_dedup_mode {
  XM_DEDUP_KEEP_FIRST = 0,
  XM_DEDUP_KEEP_ALL = 1
} xm_dedup_mode;

typedef enum xm_event_format {
  XM_EVENTS_BINARY = 0, /* "XEV1", fixed 16-byte records */
  XM_EVENTS_CSV = 1     /* header "t_us,x,y,p" */
} xm_event_format;

XM_API xm_status xm_events_create(uint16_t sensor_width, uint16_t sensor_height,
                                  const xm_event* events, size_t count,
                                  xm_events** out);
XM_API xm_status xm_events_read(const char* path, xm_events** out);
XM_API xm_status xm_events_write(const xm_events* events, const char* path,
                                 xm_event_format format);
XM_API xm_status xm_events_count(const xm_events* events, size_t* out);
XM_API xm_status xm_events_sensor_size(const xm_events* events, uint16_t* width,
                                       uint16_t* height);
XM_API xm_status xm_events_get(const xm_events* events, size_t index, xm_event* out);
XM_API xm_status xm_events_filter_positive(const xm_events* events, xm_events** out);
XM_API xm_status xm_events_dedup(const xm_events* frame_events, xm_dedup_mode mode,
                                 xm_events** out);

/* ------------------------------------------------------------------ */
/* Frame triggers                                                      */

typedef struct xm_trigger_config {
  uint64_t max_intra_frame_gap_us; /* default 40 */
  uint64_t min_frame_span_us;      /* default 8000 */
  uint64_t batch_span_us;          /* default 16667 */
} xm_trigger_config;

typedef struct xm_frame_slice {
  uint64_t start_t_us;
  uint64_t end_t_us;
  size_t begin_index;
  size_t end_index; /* one past the last event */
} xm_frame_slice;

XM_API xm_trigger_config xm_trigger_config_default(void);

/* Two-call pattern: pass slices == NULL to query the count. */
XM_API xm_status xm_split_frames(const xm_events* events, const xm_trigger_config* cfg,
                                 xm_frame_slice* slices, size_t capacity,
                                 size_t* count);

/* ------------------------------------------------------------------ */
/* Calibration and rectification                                       */

typedef struct xm_pinhole {
  double fx, fy, cx, cy;
  int32_t width, height;
} xm_pinhole;

/* Extrinsics map camera coordinates into projector coordinates:
 * p_projector = rotation * p_camera + translation. rotation is row-major. */
XM_API xm_status xm_calib_create(const xm_pinhole* camera, const xm_pinhole* projector,
                                 const double rotation[9], const double translation[3],
                                 xm_calib** out);
XM_API xm_status xm_calib_read(const char* path, xm_calib** out);
XM_API xm_status xm_calib_write(const xm_calib* calib, const char* path);
XM_API xm_status xm_calib_camera(const xm_calib* calib, xm_pinhole* out);
XM_API xm_status xm_calib_projector(const xm_calib* calib, xm_pinhole* out);
XM_API xm_status xm_calib_baseline(const xm_calib* calib, double* meters);
XM_API xm_status xm_calib_rectified_focal(const xm_calib* calib, double* pixels);

/* Dense forward maps: rectified coordinates per integer source pixel. */
XM_API xm_status xm_compute_rectification(const xm_calib* calib, xm_rectmap** camera_map,
                                          xm_rectmap** projector_map);
XM_API xm_status xm_rectmap_size(const xm_rectmap* map, int32_t* width, int32_t* height);
/* *defined = 0 flags an out-of-view source pixel (x_r/y_r are then NaN). */
XM_API xm_status xm_rectmap_lookup(const xm_rectmap* map, int32_t x, int32_t y,
                                   double* x_r, double* y_r, int32_t* defined);

XM_API xm_status xm_disparity_to_depth(const xm_calib* calib, double disparity_px,
                                       double* depth_m);
XM_API xm_status xm_event_to_3d(const xm_calib* calib, double x_r, double y_r,
                                double disparity_px, double point_xyz[3]);

/* ------------------------------------------------------------------ */
/* Time maps                                                           */

typedef enum xm_ideal_variant {
  XM_IDEAL_SIMPLE = 0, /* value(x, y) = x / width */
  XM_IDEAL_FULL = 1    /* value(x, y) = (x + y/height) / width */
} xm_ideal_variant;

XM_API xm_status xm_timemap_read(const char* path, xm_timemap** out);
XM_API xm_status xm_timemap_write(const xm_timemap* map, const char* path);
XM_API xm_status xm_timemap_size(const xm_timemap* map, int32_t* width, int32_t* height);
XM_API xm_status xm_timemap_get(const xm_timemap* map, int32_t x, int32_t y,
                                float* value, int32_t* defined);

/* Normalized first-event time per pixel of one frame slice. */
XM_API xm_status xm_build_camera_time_map(const xm_events* events,
                                          const xm_frame_slice* frame,
                                          xm_timemap** out);
XM_API xm_status xm_ideal_projector_time_map(int32_t width, int32_t height,
                                             int32_t scan_rows, double frame_rate_hz,
                                             xm_ideal_variant variant, xm_timemap** out);
XM_API xm_status xm_average_time_maps(const xm_timemap* const* maps, size_t count,
                                      xm_timemap** out);
/* Corners ordered TL, TR, BR, BL as (x, y) pairs. */
XM_API xm_status xm_find_projection_corners(const xm_timemap* map, double corners[8]);
XM_API xm_status xm_homography_from_corners(const double src[8], const double dst[8],
                                            double homography[9]);
XM_API xm_status xm_warp_time_map(const xm_timemap* map, const double homography[9],
                                  int32_t out_width, int32_t out_height,
                                  xm_timemap** out);
XM_API xm_status xm_interpolate_rows(const xm_timemap* map, xm_timemap** out);
/* Full planar-recording calibration chain; output lives on the projector grid. */
XM_API xm_status xm_calibrate_time_map(const xm_timemap* const* planar_frames,
                                       size_t count, int32_t projector_width,
                                       int32_t projector_height, xm_timemap** out);
/* Resamples a projector-grid map onto the shared rectified grid. */
XM_API xm_status xm_resample_time_map_rectified(const xm_timemap* projector_map,
                                                const xm_calib* calib, int32_t out_width,
                                                int32_t out_height, xm_timemap** out);

/* ------------------------------------------------------------------ */
/* X-maps and depth                                                    */

XM_API xm_status xm_xmap_read(const char* path, xm_xmap** out);
XM_API xm_status xm_xmap_write(const xm_xmap* xmap, const char* path);
XM_API xm_status xm_xmap_size(const xm_xmap* xmap, int32_t* height,
                              int32_t* time_columns);
XM_API xm_status xm_xmap_get(const xm_xmap* xmap, int32_t y, int32_t column,
                             float* projector_x, int32_t* defined);

/* Exhaustive per-entry construction from a rectified projector time map;
 * time_columns == 0 selects the projector width. */
XM_API xm_status xm_build_projector_xmap(const xm_timemap* rectified_projector_map,
                                         int32_t projector_width, int32_t time_columns,
                                         xm_xmap** out);

typedef enum xm_discard_reason {
  XM_DISCARD_NONE = 0,
  XM_DISCARD_UNDEFINED_ENTRY = 1,
  XM_DISCARD_NONPOSITIVE_DISPARITY = 2,
  XM_DISCARD_OUT_OF_BOUNDS = 3
} xm_discard_reason;

/* Discards are data, not errors: the call succeeds with *reason set. */
XM_API xm_status xm_lookup_disparity(const xm_xmap* xmap, double x_cr, double y_cr,
                                     uint64_t t_us, const xm_frame_slice* frame,
                                     double* disparity_px, xm_discard_reason* reason);

/* Per-event record of a computed depth frame. */
typedef struct xm_depth_point {
  float x_r, y_r;
  float disparity_px;
  float depth_m;
  uint64_t t_us;
} xm_depth_point;

XM_API xm_status xm_depth_frame_compute(const xm_events* events,
                                        const xm_frame_slice* frame, const xm_xmap* xmap,
                                        const xm_rectmap* camera_rectify,
                                        const xm_calib* calib, xm_dedup_mode dedup,
                                        xm_depth_frame** out);
XM_API xm_status xm_depth_frame_count(const xm_depth_frame* frame, size_t* out);
XM_API xm_status xm_depth_frame_get(const xm_depth_frame* frame, size_t index,
                                    xm_depth_point* out);
/* counts[4] indexed by xm_discard_reason; counts[0] receives the input size. */
XM_API xm_status xm_depth_frame_discards(const xm_depth_frame* frame, size_t counts[4]);
XM_API xm_status xm_depth_frame_span(const xm_depth_frame* frame, uint64_t* start_t_us,
                                     uint64_t* end_t_us);
XM_API xm_status xm_export_ply(const xm_depth_frame* frame, const xm_calib* calib,
                               const char* path);

/* ------------------------------------------------------------------ */
/* Oracle (row-wise brute-force search)                                */

XM_API xm_status xm_rasterize_rectified_time_map(const xm_events* events,
                                                 const xm_frame_slice* frame,
                                                 const xm_rectmap* camera_rectify,
                                                 int32_t width, int32_t height,
                                                 xm_timemap** out);
XM_API xm_status xm_esl_init_search(const xm_timemap* camera_map,
                                    const xm_timemap* projector_map,
                                    int32_t max_disparity, xm_disparity_map** out);
XM_API xm_status xm_disparity_map_size(const xm_disparity_map* map, int32_t* width,
                                       int32_t* height);
XM_API xm_status xm_disparity_map_get(const xm_disparity_map* map, int32_t x, int32_t y,
                                      float* disparity_px, int32_t* defined);

typedef struct xm_compare_stats {
  size_t n_compared;
  size_t n_matched;
  double fraction; /* NaN when n_compared == 0 (undefined comparison) */
} xm_compare_stats;

XM_API xm_status xm_compare_disparities(const xm_depth_frame* frame,
                                        const xm_disparity_map* map, double tol_px,
                                        xm_compare_stats* out);
/* Depth per defined cell; cells with d <= 0 stay undefined. */
XM_API xm_status xm_disparity_map_depth_image(const xm_disparity_map* map,
                                              const xm_calib* calib,
                                              xm_depth_image** out);

/* ------------------------------------------------------------------ */
/* Simulator                                                           */

typedef enum xm_scene_kind {
  XM_SCENE_PLANE = 0,
  XM_SCENE_STAIRCASE = 1,
  XM_SCENE_SPHERE = 2,
  XM_SCENE_HEIGHTFIELD = 3
} xm_scene_kind;

typedef struct xm_scene {
  xm_scene_kind kind;
  /* plane */
  double plane_depth_m;
  /* staircase: fronto-parallel steps along world x */
  const double* step_depths_m;
  size_t n_steps;
  double step_origin_x_m;
  double step_width_m;
  /* sphere on a background plane */
  double sphere_center[3];
  double sphere_radius_m;
  double background_depth_m;
  /* heightfield z = g(x, y) over a world-aligned grid */
  const double* heightfield_m;
  int32_t hf_cols, hf_rows;
  double hf_x0_m, hf_y0_m, hf_dx_m, hf_dy_m;
} xm_scene;

typedef struct xm_scan_profile {
  int32_t scan_rows;      /* tilted projector width; 0 = projector width */
  double frame_rate_hz;   /* default 60 */
  /* f(s) = c1 s + c2 s^2 + c3 s^3, coefficients summing to 1; all zero
   * selects the linear scan. */
  double speed_coeffs[3];
  double scan_fraction;   /* active share of the frame period; 0 = 0.78 */
  double x_jitter_sigma_px;
  double t_jitter_sigma_us;
  uint64_t refractory_us;
  double negative_event_rate;
  double duplicate_rate;
  /* Half-open scan window in projector pixels; all zero = full grid. */
  int32_t window_x0, window_x1, window_y0, window_y1;
} xm_scan_profile;

typedef struct xm_ground_truth_point {
  uint64_t emit_t_us;
  uint16_t proj_x, proj_y;
  double depth_m;
  double disparity_px;
} xm_ground_truth_point;

XM_API xm_scan_profile xm_scan_profile_default(void);

XM_API xm_status xm_simulate(const xm_scene* scene, const xm_calib* calib,
                             const xm_scan_profile* profile, int32_t frames,
                             uint64_t seed, xm_sim** out);
/* Borrowed copy of the simulated stream. */
XM_API xm_status xm_sim_events(const xm_sim* sim, xm_events** out);
XM_API xm_status xm_sim_truth_count(const xm_sim* sim, size_t* out);
XM_API xm_status xm_sim_truth_get(const xm_sim* sim, size_t index,
                                  xm_ground_truth_point* out);
XM_API xm_status xm_sim_counts(const xm_sim* sim, size_t* n_positive, size_t* n_negative,
                               size_t* n_duplicates);
XM_API xm_status xm_sim_write_ground_truth(const xm_sim* sim, const char* path);
/* Reference depth image rendered from the ground truth (nearest per pixel). */
XM_API xm_status xm_sim_true_depth_image(const xm_sim* sim, xm_depth_image** out);
XM_API xm_status xm_ideal_xmap_for(const xm_scan_profile* profile, const xm_calib* calib,
                                   int32_t time_columns, int32_t out_height,
                                   xm_xmap** out);

/* ------------------------------------------------------------------ */
/* Metrics                                                             */

XM_API xm_status xm_render_depth_image(const xm_depth_frame* frame, int32_t width,
                                       int32_t height, xm_depth_image** out);
XM_API xm_status xm_depth_image_read(const char* path, xm_depth_image** out);
XM_API xm_status xm_depth_image_write(const xm_depth_image* image, const char* path);
XM_API xm_status xm_depth_image_size(const xm_depth_image* image, int32_t* width,
                                     int32_t* height);
XM_API xm_status xm_depth_image_get(const xm_depth_image* image, int32_t x, int32_t y,
                                    float* depth_m, int32_t* defined);

XM_API xm_status xm_rmse_cm(const xm_depth_image* estimate, const xm_depth_image* reference,
                            double* out);
XM_API xm_status xm_fill_rate(const xm_depth_image* estimate,
                              const xm_depth_image* reference, double* out);
/* points = n contiguous (x, y, z) triples in meters. */
XM_API xm_status xm_plane_fit_rmse_cm(const double* points_xyz, size_t n, double* out);
XM_API xm_status xm_depth_frame_plane_fit_rmse_cm(const xm_depth_frame* frame,
                                                  const xm_calib* calib, double* out);

typedef struct xm_eval_report {
  double rmse_cm;
  double fill_rate;
  size_t n_compared;
  double mean_scene_depth_m;
  double plane_fit_rmse_cm; /* NaN when not computed */
  size_t discard_counts[4]; /* indexed by xm_discard_reason */
} xm_eval_report;

XM_API xm_status xm_evaluate(const xm_depth_image* estimate,
                             const xm_depth_image* reference,
                             const xm_depth_frame* frame /* nullable */,
                             const xm_calib* calib /* nullable */,
                             xm_eval_report* out);

/* ------------------------------------------------------------------ */
/* Benchmark                                                           */

typedef struct xm_bench_stats {
  double mean_ms;
  double stddev_ms;
  size_t n_events;
  size_t n_retained;
  int32_t repetitions;
} xm_bench_stats;

/* Wall time of the per-frame depth computation, excluding I/O and the
 * X-map build. Single-threaded. */
XM_API xm_status xm_bench_depth_frame(const xm_events* events,
                                      const xm_frame_slice* frame, const xm_xmap* xmap,
                                      const xm_rectmap* camera_rectify,
                                      const xm_calib* calib, xm_dedup_mode dedup,
                                      int32_t repetitions, xm_bench_stats* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* XMAPS_XMAPS_H */
