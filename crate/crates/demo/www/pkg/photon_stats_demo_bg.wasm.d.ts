/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_g2view_free: (a: number, b: number) => void;
export const __wbg_get_g2view_bunching_sigma: (a: number) => number;
export const __wbg_get_g2view_clicks: (a: number) => number;
export const __wbg_get_g2view_fitted: (a: number) => [number, number];
export const __wbg_get_g2view_g2_0: (a: number) => number;
export const __wbg_get_g2view_k_t_per_s: (a: number) => number;
export const __wbg_get_g2view_k_t_sigma: (a: number) => number;
export const __wbg_get_g2view_measured: (a: number) => [number, number];
export const __wbg_get_g2view_note: (a: number) => [number, number];
export const __wbg_get_g2view_sigma: (a: number) => [number, number];
export const __wbg_get_g2view_tau_ns: (a: number) => [number, number];
export const __wbg_get_g2view_theory: (a: number) => [number, number];
export const __wbg_get_spectrumview_intensity: (a: number) => [number, number];
export const __wbg_get_spectrumview_wavelength_nm: (a: number) => [number, number];
export const __wbg_get_spectrumview_zpl_model: (a: number) => [number, number];
export const __wbg_saturationview_free: (a: number, b: number) => void;
export const __wbg_set_g2view_bunching_sigma: (a: number, b: number) => void;
export const __wbg_set_g2view_clicks: (a: number, b: number) => void;
export const __wbg_set_g2view_fitted: (a: number, b: number, c: number) => void;
export const __wbg_set_g2view_g2_0: (a: number, b: number) => void;
export const __wbg_set_g2view_k_t_per_s: (a: number, b: number) => void;
export const __wbg_set_g2view_k_t_sigma: (a: number, b: number) => void;
export const __wbg_set_g2view_measured: (a: number, b: number, c: number) => void;
export const __wbg_set_g2view_note: (a: number, b: number, c: number) => void;
export const __wbg_set_g2view_sigma: (a: number, b: number, c: number) => void;
export const __wbg_set_g2view_tau_ns: (a: number, b: number, c: number) => void;
export const __wbg_set_g2view_theory: (a: number, b: number, c: number) => void;
export const __wbg_set_spectrumview_intensity: (a: number, b: number, c: number) => void;
export const __wbg_set_spectrumview_wavelength_nm: (a: number, b: number, c: number) => void;
export const __wbg_set_spectrumview_zpl_model: (a: number, b: number, c: number) => void;
export const __wbg_spectrumview_free: (a: number, b: number) => void;
export const g2_explorer: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number, number];
export const saturation_fit: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const spectrum_fit: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const __wbg_get_saturationview_efficiency: (a: number) => number;
export const __wbg_get_saturationview_i_sat: (a: number) => number;
export const __wbg_get_saturationview_i_sat_sigma: (a: number) => number;
export const __wbg_get_saturationview_p_sat: (a: number) => number;
export const __wbg_get_saturationview_p_sat_sigma: (a: number) => number;
export const __wbg_get_spectrumview_center_nm: (a: number) => number;
export const __wbg_get_spectrumview_fwhm_nm: (a: number) => number;
export const __wbg_get_spectrumview_huang_rhys: (a: number) => number;
export const __wbg_get_spectrumview_window_fraction: (a: number) => number;
export const __wbg_set_saturationview_efficiency: (a: number, b: number) => void;
export const __wbg_set_saturationview_i_sat: (a: number, b: number) => void;
export const __wbg_set_saturationview_i_sat_sigma: (a: number, b: number) => void;
export const __wbg_set_saturationview_p_sat: (a: number, b: number) => void;
export const __wbg_set_saturationview_p_sat_sigma: (a: number, b: number) => void;
export const __wbg_set_spectrumview_center_nm: (a: number, b: number) => void;
export const __wbg_set_spectrumview_fwhm_nm: (a: number, b: number) => void;
export const __wbg_set_spectrumview_huang_rhys: (a: number, b: number) => void;
export const __wbg_set_spectrumview_window_fraction: (a: number, b: number) => void;
export const __wbg_get_saturationview_model_cps: (a: number) => [number, number];
export const __wbg_get_saturationview_model_power_uw: (a: number) => [number, number];
export const __wbg_get_saturationview_power_uw: (a: number) => [number, number];
export const __wbg_get_saturationview_rate_cps: (a: number) => [number, number];
export const __wbg_get_saturationview_sigma_cps: (a: number) => [number, number];
export const __wbg_set_saturationview_model_cps: (a: number, b: number, c: number) => void;
export const __wbg_set_saturationview_model_power_uw: (a: number, b: number, c: number) => void;
export const __wbg_set_saturationview_power_uw: (a: number, b: number, c: number) => void;
export const __wbg_set_saturationview_rate_cps: (a: number, b: number, c: number) => void;
export const __wbg_set_saturationview_sigma_cps: (a: number, b: number, c: number) => void;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
