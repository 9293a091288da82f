/**
 * Result-bundle access: manifest validation plus typed readers for the
 * tables a figure needs. The pipeline never recomputes physics; every number
 * plotted comes out of these files.
 */

import { createHash } from 'node:crypto';
import { existsSync, readFileSync } from 'node:fs';
import { join } from 'node:path';

import { numericColumn, parseTsv, Table } from './tsv.js';

export const EXPECTED_SCHEMA_VERSION = 1;

export interface Manifest {
  schema_version: number;
  package_version: string;
  seed: number;
  config_sha256: string;
  input_hash: string;
  files: Record<string, string>;
  summary?: Record<string, unknown>;
}

export interface GridPointRow {
  point: number;
  kind: string;
  omegaOverPi: number;
  thetaBar: number;
  deltaR: number;
  rescaleRatio: number;
}

export class BundleSchemaError extends Error {}

export class Bundle {
  readonly root: string;
  readonly manifest: Manifest;
  /** relpath -> raw bytes of every file this figure actually read */
  readonly consumed = new Map<string, Buffer>();

  constructor(root: string) {
    this.root = root;
    const manifestPath = join(root, 'manifest.json');
    if (!existsSync(manifestPath)) {
      throw new BundleSchemaError(`${root}: no manifest.json (not a result bundle?)`);
    }
    const manifest = JSON.parse(readFileSync(manifestPath, 'utf-8')) as Manifest;
    if (manifest.schema_version !== EXPECTED_SCHEMA_VERSION) {
      throw new BundleSchemaError(
        `${root}: bundle schema version ${manifest.schema_version}, expected ${EXPECTED_SCHEMA_VERSION}`);
    }
    if (typeof manifest.files !== 'object' || manifest.files === null) {
      throw new BundleSchemaError(`${root}: manifest has no file map`);
    }
    this.manifest = manifest;
  }

  has(relpath: string): boolean {
    return existsSync(join(this.root, relpath));
  }

  readBytes(relpath: string): Buffer {
    const full = join(this.root, relpath);
    if (!existsSync(full)) {
      throw new BundleSchemaError(`${this.root}: missing bundle file ${relpath}`);
    }
    const bytes = readFileSync(full);
    const expected = this.manifest.files[relpath];
    if (expected !== undefined) {
      const digest = createHash('sha256').update(bytes).digest('hex');
      if (digest !== expected) {
        throw new BundleSchemaError(
          `${this.root}: ${relpath} does not match its manifest hash (stale or edited bundle)`);
      }
    }
    this.consumed.set(relpath, bytes);
    return bytes;
  }

  readTable(relpath: string): Table {
    return parseTsv(this.readBytes(relpath).toString('utf-8'), relpath);
  }

  readJson<T>(relpath: string): T {
    return JSON.parse(this.readBytes(relpath).toString('utf-8')) as T;
  }

  points(): GridPointRow[] {
    const t = this.readTable('points.tsv');
    const idx = numericColumn(t, 'point', 'points.tsv');
    const kind = t.columns['kind'] as string[];
    const omega = numericColumn(t, 'omega_over_pi', 'points.tsv');
    const theta = numericColumn(t, 'theta_bar', 'points.tsv');
    const dr = numericColumn(t, 'delta_r', 'points.tsv');
    const rr = numericColumn(t, 'rescale_ratio', 'points.tsv');
    return idx.map((p, i) => ({
      point: p,
      kind: String(kind[i]),
      omegaOverPi: omega[i]!,
      thetaBar: theta[i]!,
      deltaR: dr[i]!,
      rescaleRatio: rr[i]!,
    }));
  }

  aggregatePath(point: number, suffix = ''): string {
    return `aggregate/p${String(point).padStart(2, '0')}${suffix}.tsv`;
  }

  spectrumPath(point: number): string {
    return `spectra/p${String(point).padStart(2, '0')}.tsv`;
  }

  /** sha256 of everything read so far, for the figure's input manifest */
  consumedDigests(): Record<string, string> {
    const out: Record<string, string> = {};
    const entries = [...this.consumed.entries()].sort((a, b) =>
      a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0);
    for (const [rel, bytes] of entries) {
      out[rel] = createHash('sha256').update(bytes).digest('hex');
    }
    return out;
  }
}
