/* tslint:disable */
/* eslint-disable */

/**
 * Lower and upper bounds of one state for `D = 2..=dmax`.
 */
export function bound_curves(potential: string, parity: number, state: number, dmax: number): string;

export function hankel_polynomial(potential: string, dim: number, shift: number, parity: number, monic: boolean): string;

/**
 * Approximate eigenfunction from the `[M/N]` Padé approximant at `H_D^0`.
 */
export function wavefunction(potential: string, parity: number, state: number, dim: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bound_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly hankel_polynomial: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly wavefunction: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
