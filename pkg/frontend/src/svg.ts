/**
 * Minimal deterministic SVG plotting. No dependencies, no randomness, no
 * timestamps: identical inputs produce byte-identical output.
 */

export type Scale = 'linear' | 'log';

export interface Series {
  x: number[];
  y: number[];
  color: string;
  label?: string;
  dashed?: boolean;
  markers?: boolean;
  /** vertical error bars, same length as y */
  yerr?: number[];
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xScale?: Scale;
  yScale?: Scale;
  series: Series[];
}

const PANEL_W = 380;
const PANEL_H = 280;
const MARGIN = { left: 62, right: 14, top: 30, bottom: 44 };
const PALETTE = ['#1f6fb4', '#d95f02', '#2a9d4e', '#c03bc4', '#7a5230', '#444444', '#0fa3a3'];

export function seriesColor(i: number): string {
  return PALETTE[i % PALETTE.length]!;
}

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return '0';
  if (v === 0) return '0';
  const s = v.toPrecision(6);
  return s.includes('.') || s.includes('e')
    ? s.replace(/\.?0+($|e)/, '$1')
    : s;
}

function transform(value: number, scale: Scale): number {
  return scale === 'log' ? Math.log10(value) : value;
}

function usable(v: number, scale: Scale): boolean {
  return Number.isFinite(v) && (scale !== 'log' || v > 0);
}

interface Axis {
  lo: number;
  hi: number;
  scale: Scale;
  toPixel(v: number): number;
}

function makeAxis(values: number[], scale: Scale, pixelLo: number, pixelHi: number): Axis {
  const finite = values.filter((v) => usable(v, scale)).map((v) => transform(v, scale));
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = 0.04 * (hi - lo);
  lo -= pad;
  hi += pad;
  return {
    lo, hi, scale,
    toPixel(v: number): number {
      const t = (transform(v, scale) - lo) / (hi - lo);
      return pixelLo + t * (pixelHi - pixelLo);
    },
  };
}

function axisTicks(axis: Axis): number[] {
  if (axis.scale === 'log') {
    const ticks: number[] = [];
    for (let p = Math.ceil(axis.lo); p <= Math.floor(axis.hi); p++) ticks.push(10 ** p);
    if (ticks.length >= 2) return ticks;
    // narrow range: fall through to linear ticks in transformed space
  }
  const span = axis.hi - axis.lo;
  const step = niceStep(span / 4);
  const ticks: number[] = [];
  for (let v = Math.ceil(axis.lo / step) * step; v <= axis.hi + 1e-12; v += step) {
    ticks.push(axis.scale === 'log' ? 10 ** v : v);
  }
  return ticks;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(Math.abs(raw) || 1));
  const r = raw / mag;
  const base = r >= 5 ? 5 : r >= 2 ? 2 : 1;
  return base * mag;
}

function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 10000 || a < 0.01)) {
    const p = Math.round(Math.log10(a));
    if (Math.abs(a - 10 ** p) / 10 ** p < 1e-9) return `1e${p}`;
    return v.toExponential(1);
  }
  return fmt(Number(v.toFixed(6)));
}

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function renderPanel(spec: PanelSpec, ox: number, oy: number): string {
  const xScale = spec.xScale ?? 'linear';
  const yScale = spec.yScale ?? 'linear';
  const xs = spec.series.flatMap((s) => s.x.filter((v, i) =>
    usable(v, xScale) && usable(s.y[i]!, yScale)));
  const ys = spec.series.flatMap((s) => s.y.filter((v, i) =>
    usable(v, yScale) && usable(s.x[i]!, xScale)));
  const left = ox + MARGIN.left;
  const right = ox + PANEL_W - MARGIN.right;
  const top = oy + MARGIN.top;
  const bottom = oy + PANEL_H - MARGIN.bottom;
  const xAxis = makeAxis(xs, xScale, left, right);
  const yAxis = makeAxis(ys, yScale, bottom, top);

  const parts: string[] = [`<g class="panel" data-title="${esc(spec.title)}">`];
  parts.push(`<rect x="${left}" y="${top}" width="${right - left}" height="${bottom - top}" fill="none" stroke="#222" stroke-width="1"/>`);
  parts.push(`<text x="${ox + PANEL_W / 2}" y="${oy + 18}" text-anchor="middle" font-size="13" font-weight="bold">${esc(spec.title)}</text>`);
  parts.push(`<text x="${(left + right) / 2}" y="${oy + PANEL_H - 10}" text-anchor="middle" font-size="11">${esc(spec.xLabel)}</text>`);
  parts.push(`<text x="${ox + 16}" y="${(top + bottom) / 2}" text-anchor="middle" font-size="11" transform="rotate(-90 ${ox + 16} ${(top + bottom) / 2})">${esc(spec.yLabel)}</text>`);

  for (const t of axisTicks(xAxis)) {
    const px = xAxis.toPixel(t);
    if (px < left - 0.5 || px > right + 0.5) continue;
    parts.push(`<line x1="${fmt(px)}" y1="${bottom}" x2="${fmt(px)}" y2="${bottom + 4}" stroke="#222"/>`);
    parts.push(`<text x="${fmt(px)}" y="${bottom + 16}" text-anchor="middle" font-size="9">${tickLabel(t)}</text>`);
  }
  for (const t of axisTicks(yAxis)) {
    const py = yAxis.toPixel(t);
    if (py > bottom + 0.5 || py < top - 0.5) continue;
    parts.push(`<line x1="${left - 4}" y1="${fmt(py)}" x2="${left}" y2="${fmt(py)}" stroke="#222"/>`);
    parts.push(`<text x="${left - 6}" y="${fmt(py + 3)}" text-anchor="end" font-size="9">${tickLabel(t)}</text>`);
  }

  for (const s of spec.series) {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const xv = s.x[i]!;
      const yv = s.y[i]!;
      if (!usable(xv, xScale) || !usable(yv, yScale)) continue;
      pts.push(`${fmt(xAxis.toPixel(xv))},${fmt(yAxis.toPixel(yv))}`);
    }
    const dash = s.dashed ? ' stroke-dasharray="6 4"' : '';
    if (pts.length > 1) {
      parts.push(`<polyline points="${pts.join(' ')}" fill="none" stroke="${s.color}" stroke-width="1.4"${dash}/>`);
    }
    if (s.markers || pts.length === 1) {
      for (const p of pts) {
        const [px, py] = p.split(',');
        parts.push(`<circle cx="${px}" cy="${py}" r="2.4" fill="${s.color}"/>`);
      }
    }
    if (s.yerr) {
      for (let i = 0; i < s.x.length; i++) {
        const xv = s.x[i]!;
        const yv = s.y[i]!;
        const ev = s.yerr[i]!;
        if (!usable(xv, xScale) || !usable(yv, yScale) || !Number.isFinite(ev)) continue;
        const lo = yScale === 'log' ? Math.max(yv - ev, yv * 1e-3) : yv - ev;
        if (!usable(lo, yScale)) continue;
        const px = fmt(xAxis.toPixel(xv));
        parts.push(`<line x1="${px}" y1="${fmt(yAxis.toPixel(lo))}" x2="${px}" y2="${fmt(yAxis.toPixel(yv + ev))}" stroke="${s.color}" stroke-width="1"/>`);
      }
    }
  }

  // legend
  let ly = top + 6;
  for (const s of spec.series) {
    if (!s.label) continue;
    parts.push(`<line x1="${right - 86}" y1="${ly + 4}" x2="${right - 68}" y2="${ly + 4}" stroke="${s.color}" stroke-width="2"${s.dashed ? ' stroke-dasharray="6 4"' : ''}/>`);
    parts.push(`<text x="${right - 64}" y="${ly + 7}" font-size="9">${esc(s.label)}</text>`);
    ly += 13;
  }
  parts.push('</g>');
  return parts.join('\n');
}

export function svgDocument(panels: PanelSpec[], columns: number, title: string): string {
  const rows = Math.ceil(panels.length / columns);
  const width = columns * PANEL_W;
  const height = rows * PANEL_H + 24;
  const body = panels.map((p, i) => {
    const col = i % columns;
    const row = Math.floor(i / columns);
    return renderPanel(p, col * PANEL_W, 24 + row * PANEL_H);
  });
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    `<text x="${width / 2}" y="16" text-anchor="middle" font-size="14" font-weight="bold">${esc(title)}</text>`,
    ...body,
    '</svg>',
    '',
  ].join('\n');
}
