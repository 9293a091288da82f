#!/usr/bin/env node
/**
 * floquet-dtc-figures render --figure fig2 --bundle out/fig2 --out fig2.svg
 */

import { pathToFileURL } from 'node:url';

import { BundleSchemaError } from './bundle.js';
import { FIGURE_KINDS, FigureKind, renderFigure } from './render.js';

function usage(): string {
  return [
    'usage: floquet-dtc-figures render --figure <kind> --bundle <dir> --out <file.svg>',
    `  kinds: ${FIGURE_KINDS.join(', ')}`,
  ].join('\n');
}

export function main(argv: string[]): number {
  if (argv[0] !== 'render') {
    console.error(usage());
    return 2;
  }
  const opts = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key?.startsWith('--') || value === undefined) {
      console.error(usage());
      return 2;
    }
    opts.set(key.slice(2), value);
  }
  const figure = opts.get('figure');
  const bundle = opts.get('bundle');
  const out = opts.get('out');
  if (!figure || !bundle || !out) {
    console.error(usage());
    return 2;
  }
  if (!(FIGURE_KINDS as readonly string[]).includes(figure)) {
    console.error(`unknown figure kind '${figure}'; expected one of ${FIGURE_KINDS.join(', ')}`);
    return 2;
  }
  try {
    const result = renderFigure(figure as FigureKind, bundle, out);
    console.log(`rendered ${result.panelCount} panel(s) -> ${result.svgPath}`);
    console.log(`plot data copies -> ${result.dataDir}`);
    console.log(`input manifest -> ${result.inputsPath}`);
    return 0;
  } catch (err) {
    if (err instanceof BundleSchemaError) {
      console.error(`bundle schema error: ${err.message}`);
      return 3;
    }
    console.error(`render failed: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
