/* tslint:disable */
/* eslint-disable */

export class G2View {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Bunching excess over 1 in units of its σ; NaN for two-level.
     */
    bunching_sigma: number;
    clicks: number;
    /**
     * Antibunching fit; empty for the three-level emitter.
     */
    fitted: Float64Array;
    g2_0: number;
    k_t_per_s: number;
    k_t_sigma: number;
    measured: Float64Array;
    note: string;
    sigma: Float64Array;
    tau_ns: Float64Array;
    /**
     * Closed form at the same delays, before timing jitter.
     */
    theory: Float64Array;
}

export class SaturationView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * I_sat / k21 with the lifetime held at its nominal value.
     */
    efficiency: number;
    i_sat_sigma: number;
    i_sat: number;
    model_cps: Float64Array;
    model_power_uw: Float64Array;
    p_sat_sigma: number;
    p_sat: number;
    power_uw: Float64Array;
    rate_cps: Float64Array;
    sigma_cps: Float64Array;
}

export class SpectrumView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    center_nm: number;
    fwhm_nm: number;
    huang_rhys: number;
    intensity: Float64Array;
    wavelength_nm: Float64Array;
    window_fraction: number;
    zpl_model: Float64Array;
}

/**
 * Simulates one HBT run and fits it.
 */
export function g2_explorer(three_level: boolean, power_uw: number, signal_fraction: number, efficiency: number, jitter_ps: number, duration_s: number, seed: bigint): G2View;

/**
 * Noisy count rates over a power sweep and their saturation fit.
 */
export function saturation_fit(efficiency: number, dwell_s: number, max_power_uw: number, seed: bigint): SaturationView;

/**
 * Synthesizes a ZPL plus phonon sideband, adds shot noise and fits the ZPL.
 */
export function spectrum_fit(zpl_center_nm: number, zpl_fwhm_nm: number, zpl_share: number, peak_counts: number, seed: bigint): SpectrumView;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_g2view_free: (a: number, b: number) => void;
    readonly __wbg_get_g2view_bunching_sigma: (a: number) => number;
    readonly __wbg_get_g2view_clicks: (a: number) => number;
    readonly __wbg_get_g2view_fitted: (a: number) => [number, number];
    readonly __wbg_get_g2view_g2_0: (a: number) => number;
    readonly __wbg_get_g2view_k_t_per_s: (a: number) => number;
    readonly __wbg_get_g2view_k_t_sigma: (a: number) => number;
    readonly __wbg_get_g2view_measured: (a: number) => [number, number];
    readonly __wbg_get_g2view_note: (a: number) => [number, number];
    readonly __wbg_get_g2view_sigma: (a: number) => [number, number];
    readonly __wbg_get_g2view_tau_ns: (a: number) => [number, number];
    readonly __wbg_get_g2view_theory: (a: number) => [number, number];
    readonly __wbg_get_spectrumview_intensity: (a: number) => [number, number];
    readonly __wbg_get_spectrumview_wavelength_nm: (a: number) => [number, number];
    readonly __wbg_get_spectrumview_zpl_model: (a: number) => [number, number];
    readonly __wbg_saturationview_free: (a: number, b: number) => void;
    readonly __wbg_set_g2view_bunching_sigma: (a: number, b: number) => void;
    readonly __wbg_set_g2view_clicks: (a: number, b: number) => void;
    readonly __wbg_set_g2view_fitted: (a: number, b: number, c: number) => void;
    readonly __wbg_set_g2view_g2_0: (a: number, b: number) => void;
    readonly __wbg_set_g2view_k_t_per_s: (a: number, b: number) => void;
    readonly __wbg_set_g2view_k_t_sigma: (a: number, b: number) => void;
    readonly __wbg_set_g2view_measured: (a: number, b: number, c: number) => void;
    readonly __wbg_set_g2view_note: (a: number, b: number, c: number) => void;
    readonly __wbg_set_g2view_sigma: (a: number, b: number, c: number) => void;
    readonly __wbg_set_g2view_tau_ns: (a: number, b: number, c: number) => void;
    readonly __wbg_set_g2view_theory: (a: number, b: number, c: number) => void;
    readonly __wbg_set_spectrumview_intensity: (a: number, b: number, c: number) => void;
    readonly __wbg_set_spectrumview_wavelength_nm: (a: number, b: number, c: number) => void;
    readonly __wbg_set_spectrumview_zpl_model: (a: number, b: number, c: number) => void;
    readonly __wbg_spectrumview_free: (a: number, b: number) => void;
    readonly g2_explorer: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
    readonly saturation_fit: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly spectrum_fit: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly __wbg_get_saturationview_efficiency: (a: number) => number;
    readonly __wbg_get_saturationview_i_sat: (a: number) => number;
    readonly __wbg_get_saturationview_i_sat_sigma: (a: number) => number;
    readonly __wbg_get_saturationview_p_sat: (a: number) => number;
    readonly __wbg_get_saturationview_p_sat_sigma: (a: number) => number;
    readonly __wbg_get_spectrumview_center_nm: (a: number) => number;
    readonly __wbg_get_spectrumview_fwhm_nm: (a: number) => number;
    readonly __wbg_get_spectrumview_huang_rhys: (a: number) => number;
    readonly __wbg_get_spectrumview_window_fraction: (a: number) => number;
    readonly __wbg_set_saturationview_efficiency: (a: number, b: number) => void;
    readonly __wbg_set_saturationview_i_sat: (a: number, b: number) => void;
    readonly __wbg_set_saturationview_i_sat_sigma: (a: number, b: number) => void;
    readonly __wbg_set_saturationview_p_sat: (a: number, b: number) => void;
    readonly __wbg_set_saturationview_p_sat_sigma: (a: number, b: number) => void;
    readonly __wbg_set_spectrumview_center_nm: (a: number, b: number) => void;
    readonly __wbg_set_spectrumview_fwhm_nm: (a: number, b: number) => void;
    readonly __wbg_set_spectrumview_huang_rhys: (a: number, b: number) => void;
    readonly __wbg_set_spectrumview_window_fraction: (a: number, b: number) => void;
    readonly __wbg_get_saturationview_model_cps: (a: number) => [number, number];
    readonly __wbg_get_saturationview_model_power_uw: (a: number) => [number, number];
    readonly __wbg_get_saturationview_power_uw: (a: number) => [number, number];
    readonly __wbg_get_saturationview_rate_cps: (a: number) => [number, number];
    readonly __wbg_get_saturationview_sigma_cps: (a: number) => [number, number];
    readonly __wbg_set_saturationview_model_cps: (a: number, b: number, c: number) => void;
    readonly __wbg_set_saturationview_model_power_uw: (a: number, b: number, c: number) => void;
    readonly __wbg_set_saturationview_power_uw: (a: number, b: number, c: number) => void;
    readonly __wbg_set_saturationview_rate_cps: (a: number, b: number, c: number) => void;
    readonly __wbg_set_saturationview_sigma_cps: (a: number, b: number, c: number) => void;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
