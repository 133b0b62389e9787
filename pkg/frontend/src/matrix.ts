/**
 * Pairwise judgment matrix editor state.
 *
 * Only the upper triangle is stored; the diagonal is fixed at 1 and the
 * lower triangle is always the elementwise reciprocal of the upper, so
 * no reachable state can violate a(i,j) * a(j,i) = 1. Editing a cell in
 * either triangle writes through to the one stored judgment.
 */

import type { AnalyzeResponse } from "./types";

export interface SaatyChoice {
  label: string;
  value: number;
}

// 17 anchors: 9..2, 1, 1/2..1/9
export const SAATY_CHOICES: SaatyChoice[] = (() => {
  const out: SaatyChoice[] = [];
  for (let k = 9; k >= 2; k--) out.push({ label: String(k), value: k });
  out.push({ label: "1", value: 1 });
  for (let k = 2; k <= 9; k++) out.push({ label: `1/${k}`, value: 1 / k });
  return out;
})();

export function saatyLabel(value: number): string | null {
  for (const c of SAATY_CHOICES) {
    if (Math.abs(c.value - value) <= 1e-12) return c.label;
  }
  return null;
}

export class MatrixModel {
  readonly criteria: string[];
  /** upper[key(i,j)] for i < j */
  private readonly judgments: Map<string, number>;
  dirty: boolean;
  report: AnalyzeResponse | null;

  constructor(criteria: string[]) {
    if (criteria.length < 2) throw new Error("need at least 2 criteria");
    this.criteria = [...criteria];
    this.judgments = new Map();
    this.dirty = false;
    this.report = null;
  }

  get n(): number {
    return this.criteria.length;
  }

  private key(i: number, j: number): string {
    return `${i},${j}`;
  }

  private check(i: number, j: number): void {
    const n = this.n;
    if (i < 0 || j < 0 || i >= n || j >= n || i === j) {
      throw new Error(`not an editable cell: (${i}, ${j})`);
    }
  }

  /**
   * Set one judgment. Accepts either triangle; a lower-triangle edit is
   * stored as the reciprocal upper judgment, so both displayed cells
   * move in the same state transition.
   */
  set(i: number, j: number, value: number): void {
    this.check(i, j);
    if (!Number.isFinite(value) || value <= 0) {
      throw new Error(`judgment must be a positive number, got ${value}`);
    }
    if (i < j) this.judgments.set(this.key(i, j), value);
    else this.judgments.set(this.key(j, i), 1 / value);
    this.dirty = true;
  }

  /** Value at any cell, reciprocals and the unit diagonal included. */
  at(i: number, j: number): number {
    if (i === j) return 1;
    this.check(i, j);
    const upper = this.judgments.get(i < j ? this.key(i, j) : this.key(j, i));
    const v = upper ?? 1;
    return i < j ? v : 1 / v;
  }

  /** Full matrix for the consistency endpoint. */
  entries(): number[][] {
    const n = this.n;
    const out: number[][] = [];
    for (let i = 0; i < n; i++) {
      const row: number[] = [];
      for (let j = 0; j < n; j++) row.push(this.at(i, j));
      out.push(row);
    }
    return out;
  }

  /** Record the service verdict for the judgments it was computed from. */
  acceptReport(report: AnalyzeResponse): void {
    this.report = report;
    this.dirty = false;
  }
}
