/* tslint:disable */
/* eslint-disable */

/**
 * Base-`p` digits of each `1/d_i` and where their sum first carries.
 */
export function digit_table(exponents: string, p: number): string;

/**
 * Jumps of the Fermat form in `(0, 1]`, plus a grid scan up to
 * `e_max` when it is positive. The scan runs under a small budget.
 */
export function fermat_jumps(d: number, p: number, e_max: number): string;

/**
 * Threshold of the diagonal form for every prime in `lo..=hi`.
 */
export function fpt_curve(exponents: string, lo: number, hi: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly digit_table: (a: number, b: number, c: number) => [number, number];
    readonly fermat_jumps: (a: number, b: number, c: number) => [number, number];
    readonly fpt_curve: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
