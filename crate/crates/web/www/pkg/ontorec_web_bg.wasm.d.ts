/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_annotate: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_articles: (a: number) => [number, number];
export const demo_compare: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const demo_concepts: (a: number) => [number, number];
export const demo_new: () => [number, number, number];
export const demo_rate: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const demo_setProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
