/* tslint:disable */
/* eslint-disable */

/**
 * One PKG, one gNB key and one UE trust store.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `now_s` is Unix seconds; the gNB key is valid for 600 s from then.
     */
    constructor(seed: number, nrcell_id: number, now_s: number);
    /**
     * Returns the 111-byte authentication record for `sib1`.
     */
    sign(sib1: string, t_sign_ms: number, dt_ms: number): Uint8Array;
    /**
     * "accepted" or "rejected(reason)".
     */
    verify(payload: Uint8Array, sib1: string, now_ms: number): string;
    readonly identity_hex: string;
    readonly key_expiry_ms: number;
}

/**
 * 1 where a payload signed at time 0 is still fresh `delay` ms later, 0
 * where it is stale. Delays run from `from_ms` to `to_ms` inclusive.
 */
export function freshness_sweep(dt_ms: number, skew_ms: number, from_ms: number, to_ms: number, step_ms: number): Uint8Array;

/**
 * Security level in bits, or NaN for parameters out of range.
 */
export function security_bits(t: number, k: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_identity_hex: (a: number) => [number, number];
    readonly demo_key_expiry_ms: (a: number) => number;
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_sign: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_verify: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly freshness_sweep: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly security_bits: (a: number, b: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
