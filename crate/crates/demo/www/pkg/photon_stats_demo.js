/* @ts-self-types="./photon_stats_demo.d.ts" */

export class G2View {
    static __wrap(ptr) {
        const obj = Object.create(G2View.prototype);
        obj.__wbg_ptr = ptr;
        G2ViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        G2ViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_g2view_free(ptr, 0);
    }
    /**
     * Bunching excess over 1 in units of its σ; NaN for two-level.
     * @returns {number}
     */
    get bunching_sigma() {
        const ret = wasm.__wbg_get_g2view_bunching_sigma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get clicks() {
        const ret = wasm.__wbg_get_g2view_clicks(this.__wbg_ptr);
        return ret;
    }
    /**
     * Antibunching fit; empty for the three-level emitter.
     * @returns {Float64Array}
     */
    get fitted() {
        const ret = wasm.__wbg_get_g2view_fitted(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get g2_0() {
        const ret = wasm.__wbg_get_g2view_g2_0(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get k_t_per_s() {
        const ret = wasm.__wbg_get_g2view_k_t_per_s(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get k_t_sigma() {
        const ret = wasm.__wbg_get_g2view_k_t_sigma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get measured() {
        const ret = wasm.__wbg_get_g2view_measured(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {string}
     */
    get note() {
        let deferred1_0;
        let deferred1_1;
        try {
            const ret = wasm.__wbg_get_g2view_note(this.__wbg_ptr);
            deferred1_0 = ret[0];
            deferred1_1 = ret[1];
            return getStringFromWasm0(ret[0], ret[1]);
        } finally {
            wasm.__wbindgen_free(deferred1_0, deferred1_1, 1);
        }
    }
    /**
     * @returns {Float64Array}
     */
    get sigma() {
        const ret = wasm.__wbg_get_g2view_sigma(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get tau_ns() {
        const ret = wasm.__wbg_get_g2view_tau_ns(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Closed form at the same delays, before timing jitter.
     * @returns {Float64Array}
     */
    get theory() {
        const ret = wasm.__wbg_get_g2view_theory(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * Bunching excess over 1 in units of its σ; NaN for two-level.
     * @param {number} arg0
     */
    set bunching_sigma(arg0) {
        wasm.__wbg_set_g2view_bunching_sigma(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set clicks(arg0) {
        wasm.__wbg_set_g2view_clicks(this.__wbg_ptr, arg0);
    }
    /**
     * Antibunching fit; empty for the three-level emitter.
     * @param {Float64Array} arg0
     */
    set fitted(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_fitted(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set g2_0(arg0) {
        wasm.__wbg_set_g2view_g2_0(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set k_t_per_s(arg0) {
        wasm.__wbg_set_g2view_k_t_per_s(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set k_t_sigma(arg0) {
        wasm.__wbg_set_g2view_k_t_sigma(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set measured(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_measured(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {string} arg0
     */
    set note(arg0) {
        const ptr0 = passStringToWasm0(arg0, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_note(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set sigma(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_sigma(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set tau_ns(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_tau_ns(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * Closed form at the same delays, before timing jitter.
     * @param {Float64Array} arg0
     */
    set theory(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_g2view_theory(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) G2View.prototype[Symbol.dispose] = G2View.prototype.free;

export class SaturationView {
    static __wrap(ptr) {
        const obj = Object.create(SaturationView.prototype);
        obj.__wbg_ptr = ptr;
        SaturationViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SaturationViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_saturationview_free(ptr, 0);
    }
    /**
     * I_sat / k21 with the lifetime held at its nominal value.
     * @returns {number}
     */
    get efficiency() {
        const ret = wasm.__wbg_get_saturationview_efficiency(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get i_sat_sigma() {
        const ret = wasm.__wbg_get_saturationview_i_sat_sigma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get i_sat() {
        const ret = wasm.__wbg_get_saturationview_i_sat(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get model_cps() {
        const ret = wasm.__wbg_get_saturationview_model_cps(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get model_power_uw() {
        const ret = wasm.__wbg_get_saturationview_model_power_uw(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get p_sat_sigma() {
        const ret = wasm.__wbg_get_saturationview_p_sat_sigma(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get p_sat() {
        const ret = wasm.__wbg_get_saturationview_p_sat(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get power_uw() {
        const ret = wasm.__wbg_get_saturationview_power_uw(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get rate_cps() {
        const ret = wasm.__wbg_get_saturationview_rate_cps(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get sigma_cps() {
        const ret = wasm.__wbg_get_saturationview_sigma_cps(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * I_sat / k21 with the lifetime held at its nominal value.
     * @param {number} arg0
     */
    set efficiency(arg0) {
        wasm.__wbg_set_saturationview_efficiency(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set i_sat_sigma(arg0) {
        wasm.__wbg_set_saturationview_i_sat_sigma(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set i_sat(arg0) {
        wasm.__wbg_set_saturationview_i_sat(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set model_cps(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_saturationview_model_cps(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set model_power_uw(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_saturationview_model_power_uw(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set p_sat_sigma(arg0) {
        wasm.__wbg_set_saturationview_p_sat_sigma(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set p_sat(arg0) {
        wasm.__wbg_set_saturationview_p_sat(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set power_uw(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_saturationview_power_uw(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set rate_cps(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_saturationview_rate_cps(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set sigma_cps(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_saturationview_sigma_cps(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) SaturationView.prototype[Symbol.dispose] = SaturationView.prototype.free;

export class SpectrumView {
    static __wrap(ptr) {
        const obj = Object.create(SpectrumView.prototype);
        obj.__wbg_ptr = ptr;
        SpectrumViewFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SpectrumViewFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_spectrumview_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get center_nm() {
        const ret = wasm.__wbg_get_spectrumview_center_nm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get fwhm_nm() {
        const ret = wasm.__wbg_get_spectrumview_fwhm_nm(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get huang_rhys() {
        const ret = wasm.__wbg_get_spectrumview_huang_rhys(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get intensity() {
        const ret = wasm.__wbg_get_spectrumview_intensity(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {Float64Array}
     */
    get wavelength_nm() {
        const ret = wasm.__wbg_get_spectrumview_wavelength_nm(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @returns {number}
     */
    get window_fraction() {
        const ret = wasm.__wbg_get_spectrumview_window_fraction(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {Float64Array}
     */
    get zpl_model() {
        const ret = wasm.__wbg_get_spectrumview_zpl_model(this.__wbg_ptr);
        var v1 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v1;
    }
    /**
     * @param {number} arg0
     */
    set center_nm(arg0) {
        wasm.__wbg_set_spectrumview_center_nm(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set fwhm_nm(arg0) {
        wasm.__wbg_set_spectrumview_fwhm_nm(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set huang_rhys(arg0) {
        wasm.__wbg_set_spectrumview_huang_rhys(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set intensity(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_spectrumview_intensity(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set wavelength_nm(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_spectrumview_wavelength_nm(this.__wbg_ptr, ptr0, len0);
    }
    /**
     * @param {number} arg0
     */
    set window_fraction(arg0) {
        wasm.__wbg_set_spectrumview_window_fraction(this.__wbg_ptr, arg0);
    }
    /**
     * @param {Float64Array} arg0
     */
    set zpl_model(arg0) {
        const ptr0 = passArrayF64ToWasm0(arg0, wasm.__wbindgen_malloc);
        const len0 = WASM_VECTOR_LEN;
        wasm.__wbg_set_spectrumview_zpl_model(this.__wbg_ptr, ptr0, len0);
    }
}
if (Symbol.dispose) SpectrumView.prototype[Symbol.dispose] = SpectrumView.prototype.free;

/**
 * Simulates one HBT run and fits it.
 * @param {boolean} three_level
 * @param {number} power_uw
 * @param {number} signal_fraction
 * @param {number} efficiency
 * @param {number} jitter_ps
 * @param {number} duration_s
 * @param {bigint} seed
 * @returns {G2View}
 */
export function g2_explorer(three_level, power_uw, signal_fraction, efficiency, jitter_ps, duration_s, seed) {
    const ret = wasm.g2_explorer(three_level, power_uw, signal_fraction, efficiency, jitter_ps, duration_s, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return G2View.__wrap(ret[0]);
}

/**
 * Noisy count rates over a power sweep and their saturation fit.
 * @param {number} efficiency
 * @param {number} dwell_s
 * @param {number} max_power_uw
 * @param {bigint} seed
 * @returns {SaturationView}
 */
export function saturation_fit(efficiency, dwell_s, max_power_uw, seed) {
    const ret = wasm.saturation_fit(efficiency, dwell_s, max_power_uw, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return SaturationView.__wrap(ret[0]);
}

/**
 * Synthesizes a ZPL plus phonon sideband, adds shot noise and fits the ZPL.
 * @param {number} zpl_center_nm
 * @param {number} zpl_fwhm_nm
 * @param {number} zpl_share
 * @param {number} peak_counts
 * @param {bigint} seed
 * @returns {SpectrumView}
 */
export function spectrum_fit(zpl_center_nm, zpl_fwhm_nm, zpl_share, peak_counts, seed) {
    const ret = wasm.spectrum_fit(zpl_center_nm, zpl_fwhm_nm, zpl_share, peak_counts, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return SpectrumView.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg___wbindgen_throw_344f42d3211c4765: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_cast_0000000000000001: function(arg0, arg1) {
            // Cast intrinsic for `Ref(String) -> Externref`.
            const ret = getStringFromWasm0(arg0, arg1);
            return ret;
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./photon_stats_demo_bg.js": import0,
    };
}

const G2ViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_g2view_free(ptr, 1));
const SaturationViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_saturationview_free(ptr, 1));
const SpectrumViewFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_spectrumview_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function passArrayF64ToWasm0(arg, malloc) {
    const ptr = malloc(arg.length * 8, 8) >>> 0;
    getFloat64ArrayMemory0().set(arg, ptr / 8);
    WASM_VECTOR_LEN = arg.length;
    return ptr;
}

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = module.ok && expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('photon_stats_demo_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };
