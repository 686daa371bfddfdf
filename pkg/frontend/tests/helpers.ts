/** Shared test utilities: fixture loading and a tiny seeded RNG. */

import {readFileSync} from 'node:fs';

import {ReportIndex} from '../src/report';

/**
 * Committed profile reports produced by the backend CLI; between them they
 * cover every operator kind and include at least one interaction pulse each
 * (see README.md for the exact commands that regenerate them).
 */
export const FIXTURE_NAMES = [
  'fig4',
  'filter_signal',
  'formula_line',
  'multi_dataset',
] as const;

export type FixtureName = (typeof FIXTURE_NAMES)[number];

export function fixtureText(name: FixtureName): string {
  const url = new URL(`./fixtures/${name}.report.json`, import.meta.url);
  return readFileSync(url, 'utf8');
}

const indexCache = new Map<FixtureName, ReportIndex>();

export function fixtureIndex(name: FixtureName): ReportIndex {
  let cached = indexCache.get(name);
  if (cached === undefined) {
    cached = ReportIndex.fromText(fixtureText(name));
    indexCache.set(name, cached);
  }
  return cached;
}

/** Deterministic 32-bit RNG so sampled checks are reproducible. */
export function seededRng(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** n picks from a pool, with replacement, using the given RNG. */
export function sample<T>(pool: ReadonlyArray<T>, n: number, rng: () => number): T[] {
  if (pool.length === 0) {
    return [];
  }
  const out: T[] = [];
  for (let i = 0; i < n; i++) {
    out.push(pool[Math.floor(rng() * pool.length)]!);
  }
  return out;
}
