/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    annotate(text: string): string;
    /**
     * JSON list of `{id, title, body, publishedDate}`.
     */
    articles(): string;
    compare(query: string, gamma: number, k: number): string;
    /**
     * JSON list of `{id, label}`.
     */
    concepts(): string;
    constructor();
    rate(article_id: string, rating: number): string;
    /**
     * `seeds` is a JSON list of concept ids.
     */
    setProfile(seeds: string): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_annotate: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_articles: (a: number) => [number, number];
    readonly demo_compare: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_concepts: (a: number) => [number, number];
    readonly demo_new: () => [number, number, number];
    readonly demo_rate: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_setProfile: (a: number, b: number, c: number) => [number, number, number, number];
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
