/**
 * Figure assembly: picks the right bundle tables for each figure kind and
 * lays the panels out. Alongside the image it writes
 *   <out>.data/   verbatim copies of every table the panels plotted
 *   <out>.inputs.json   sha256 manifest tying the figure to its inputs
 */

import { createHash } from 'node:crypto';
import { mkdirSync, writeFileSync } from 'node:fs';
import { dirname, join } from 'node:path';

import { Bundle, GridPointRow } from './bundle.js';
import { numericColumn, Table } from './tsv.js';
import { PanelSpec, Series, seriesColor, svgDocument } from './svg.js';

export const FIGURE_KINDS = ['fig2', 'fig3', 'fig4', 'fig5', 'fig7'] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

interface FitSummary {
  slope?: number;
  intercept?: number;
  r_squared?: number;
  error?: string;
}

function col(table: Table, name: string, path: string): number[] {
  return numericColumn(table, name, path);
}

function observablePanels(bundle: Bundle, points: GridPointRow[],
                          labelOf: (p: GridPointRow) => string): PanelSpec[] {
  const hSeries: Series[] = [];
  const mzSeries: Series[] = [];
  const dSeries: Series[] = [];
  points.forEach((p, i) => {
    const rel = bundle.aggregatePath(p.point);
    const agg = bundle.readTable(rel);
    const t = col(agg, 't_over_T', rel);
    const color = seriesColor(i);
    hSeries.push({ x: t, y: col(agg, 'h_eff_mean', rel), color, label: labelOf(p) });
    dSeries.push({ x: t, y: col(agg, 'd_mean', rel), color, label: labelOf(p) });
    // magnetization drawn as the even/odd period pair in one color
    for (const parity of ['even', 'odd'] as const) {
      const prel = bundle.aggregatePath(p.point, `_period_${parity}`);
      const per = bundle.readTable(prel);
      const tp = col(per, 'period', prel).map((v) => 2 * v);
      mzSeries.push({
        x: tp, y: col(per, 'mz_mean', prel), color,
        label: parity === 'even' ? labelOf(p) : undefined,
      });
    }
  });
  return [
    { title: 'Average energy density', xLabel: 't / T', yLabel: 'H_eff per site', xScale: 'log', series: hSeries },
    { title: 'Magnetization (even and odd periods)', xLabel: 't / T', yLabel: 'Mz', xScale: 'log', series: mzSeries },
    { title: 'Normalized decorrelator', xLabel: 't / T', yLabel: 'd', xScale: 'log', series: dSeries },
  ];
}

function tauPanel(bundle: Bundle): PanelSpec {
  const rel = 'tau_summary.tsv';
  const t = bundle.readTable(rel);
  const omega = col(t, 'omega_over_pi', rel).map((v) => v * Math.PI);
  const mean = col(t, 'tau_mean_periods', rel);
  const sd = col(t, 'tau_sd_periods', rel);
  const series: Series[] = [{
    x: omega, y: mean, yerr: sd, color: seriesColor(0), markers: true,
    label: 'mean tau*',
  }];
  const fits = bundle.readJson<Record<string, FitSummary>>('fit.json');
  const fit = Object.values(fits)[0];
  if (fit && fit.slope !== undefined && fit.intercept !== undefined) {
    const xs: number[] = [];
    const ys: number[] = [];
    const lo = Math.min(...omega);
    const hi = Math.max(...omega);
    for (let k = 0; k <= 40; k++) {
      const w = lo + ((hi - lo) * k) / 40;
      xs.push(w);
      ys.push(Math.exp(fit.slope * w + fit.intercept));
    }
    series.push({
      x: xs, y: ys, color: '#111111', dashed: true,
      label: `exp fit, c = ${fit.slope.toFixed(2)}`,
    });
  }
  return { title: 'Thermalization time vs drive frequency', xLabel: 'omega (rad)',
           yLabel: 'tau* (drive periods)', yScale: 'log', series };
}

function figure2(bundle: Bundle): PanelSpec[] {
  const points = bundle.points().filter((p) => p.kind === 'floquet');
  const panels = observablePanels(bundle, points,
    (p) => `w/pi = ${p.omegaOverPi}`);
  panels.push(tauPanel(bundle));
  return panels;
}

function figure3(bundle: Bundle): PanelSpec[] {
  const rel = 'f_table.tsv';
  const t = bundle.readTable(rel);
  const dr = col(t, 'delta_r', rel).map((v) => v / Math.PI);
  const fPanel: PanelSpec = {
    title: 'Crystalline fraction vs flip error', xLabel: 'delta_r / pi',
    yLabel: 'f', series: [
      { x: dr, y: col(t, 'f_mean', rel), color: seriesColor(0), markers: true, label: 'driven chain' },
      { x: dr, y: col(t, 'control_f_mean', rel), color: seriesColor(1), markers: true, label: 'control (no couplings)' },
    ],
  };
  const points = bundle.points();
  const specSeries: Series[] = [];
  points.forEach((p, i) => {
    const rel2 = bundle.spectrumPath(p.point);
    if (!bundle.has(rel2)) return;
    const sp = bundle.readTable(rel2);
    specSeries.push({
      x: col(sp, 'omega', rel2), y: col(sp, 'power', rel2),
      color: seriesColor(i), label: `dr = ${(p.deltaR / Math.PI).toFixed(3)} pi`,
    });
  });
  const specPanel: PanelSpec = {
    title: 'Magnetization spectra', xLabel: 'omega_k (rad per period)',
    yLabel: 'power', yScale: 'log', series: specSeries,
  };
  return [fPanel, specPanel];
}

function figure4(bundle: Bundle): PanelSpec[] {
  const points = bundle.points().filter((p) => p.kind === 'floquet');
  return observablePanels(bundle, points,
    (p) => `S0z = ${Math.cos(p.thetaBar).toFixed(2)}`);
}

function figure5(bundle: Bundle): PanelSpec[] {
  const rel = 'tau_summary.tsv';
  const t = bundle.readTable(rel);
  const omega = col(t, 'omega_over_pi', rel);
  const mean = col(t, 'tau_mean_periods', rel);
  const sd = col(t, 'tau_sd_periods', rel);
  const ratio = col(t, 'rescale_ratio', rel);
  const ratios = [...new Set(ratio)].sort((a, b) => a - b);
  const series: Series[] = ratios.map((r, i) => {
    const sel = ratio.map((v, k) => (v === r ? k : -1)).filter((k) => k >= 0);
    return {
      x: sel.map((k) => omega[k]!), y: sel.map((k) => mean[k]!),
      yerr: sel.map((k) => sd[k]!), color: seriesColor(i), markers: true,
      label: `r = ${r.toFixed(1)}`,
    };
  });
  const tauPanelSpec: PanelSpec = {
    title: 'Saturation of thermalization times', xLabel: 'omega / pi',
    yLabel: 'tau* (drive periods)', yScale: 'log', series,
  };
  const panels = [tauPanelSpec];
  if (bundle.has('tau_c.tsv')) {
    const rel2 = 'tau_c.tsv';
    const tc = bundle.readTable(rel2);
    panels.push({
      title: 'Toggling-frame crossover time', xLabel: 'rescale ratio r',
      yLabel: 'tau_c (time)', yScale: 'log', series: [{
        x: col(tc, 'rescale_ratio', rel2), y: col(tc, 'tau_c', rel2),
        color: seriesColor(0), markers: true, label: 'tau_c',
      }],
    });
  }
  return panels;
}

function figure7(bundle: Bundle): PanelSpec[] {
  const points = bundle.points().filter((p) => p.kind === 'floquet');
  return observablePanels(bundle, points, (p) => `w/pi = ${p.omegaOverPi}`);
}

const BUILDERS: Record<FigureKind, (b: Bundle) => PanelSpec[]> = {
  fig2: figure2,
  fig3: figure3,
  fig4: figure4,
  fig5: figure5,
  fig7: figure7,
};

const TITLES: Record<FigureKind, string> = {
  fig2: 'Stroboscopic observables and thermalization times',
  fig3: 'Flip-error robustness of the subharmonic response',
  fig4: 'Initial-state dependence',
  fig5: 'High-frequency saturation',
  fig7: 'Alternate coupling set',
};

export interface RenderResult {
  svgPath: string;
  dataDir: string;
  inputsPath: string;
  panelCount: number;
}

export function renderFigure(kind: FigureKind, bundleDir: string, outPath: string): RenderResult {
  const bundle = new Bundle(bundleDir);
  const panels = BUILDERS[kind](bundle);
  const columns = panels.length >= 4 ? 2 : panels.length;
  const svg = svgDocument(panels, columns, TITLES[kind]);

  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, svg);

  // verbatim copies of every plotted table, byte for byte
  const dataDir = `${outPath}.data`;
  for (const [rel, bytes] of bundle.consumed.entries()) {
    const target = join(dataDir, rel);
    mkdirSync(dirname(target), { recursive: true });
    writeFileSync(target, bytes);
  }

  const inputsPath = `${outPath}.inputs.json`;
  const payload = {
    figure: kind,
    bundle: bundleDir,
    bundle_input_hash: bundle.manifest.input_hash,
    svg_sha256: createHash('sha256').update(svg).digest('hex'),
    inputs: bundle.consumedDigests(),
  };
  writeFileSync(inputsPath, JSON.stringify(payload, null, 2) + '\n');

  return { svgPath: outPath, dataDir, inputsPath, panelCount: panels.length };
}
