/**
 * Tab-separated tables with a one-line header, as written by the simulator.
 * Numeric cells parse to numbers ("nan" to NaN); anything else stays a string.
 */

export interface Table {
  header: string[];
  /** column name -> values; numeric columns are number[], else string[] */
  columns: Record<string, number[] | string[]>;
  rows: number;
}

export function parseTsv(text: string, path: string): Table {
  const lines = text.split('\n').filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error(`${path}: empty table`);
  const header = lines[0]!.split('\t');
  const raw: string[][] = header.map(() => []);
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i]!.split('\t');
    if (parts.length !== header.length) {
      throw new Error(`${path}: ragged row ${i + 1} (${parts.length} cells, expected ${header.length})`);
    }
    parts.forEach((cell, k) => raw[k]!.push(cell));
  }
  const columns: Record<string, number[] | string[]> = {};
  header.forEach((name, k) => {
    const cells = raw[k]!;
    const nums = cells.map(parseNumeric);
    columns[name] = nums.every((v) => v !== undefined)
      ? (nums as number[])
      : cells;
  });
  return { header, columns, rows: lines.length - 1 };
}

function parseNumeric(cell: string): number | undefined {
  if (cell === 'nan') return NaN;
  if (cell === '' || Number.isNaN(Number(cell))) return undefined;
  return Number(cell);
}

export function numericColumn(table: Table, name: string, path: string): number[] {
  const col = table.columns[name];
  if (col === undefined) {
    throw new Error(`${path}: missing column '${name}' (have: ${table.header.join(', ')})`);
  }
  if (col.length > 0 && typeof col[0] !== 'number') {
    throw new Error(`${path}: column '${name}' is not numeric`);
  }
  return col as number[];
}
