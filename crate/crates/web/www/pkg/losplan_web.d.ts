/* tslint:disable */
/* eslint-disable */

/**
 * Floor-plan JSON of a bundled layout.
 */
export function corpus_layout(name: string): string;

/**
 * Names of the bundled layouts.
 */
export function corpus_names(): string;

/**
 * Rings of the area seen from `(x, y)` within range `r`; a non-positive or
 * infinite `r` means unbounded.
 */
export function los_area(layout_json: string, x: number, y: number, r: number): string;

/**
 * Plans a deployment. `config_json` holds any `PlanConfig` fields; the
 * result carries the deployment and the placement area of every PRN.
 */
export function plan(layout_json: string, config_json: string): string;

/**
 * Samples UEs against a deployment and reports coverage, the EVA CDF and
 * every sample.
 */
export function verify(layout_json: string, deployment_json: string, samples: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly corpus_layout: (a: number, b: number) => [number, number, number, number];
    readonly corpus_names: () => [number, number];
    readonly los_area: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly plan: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly verify: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
