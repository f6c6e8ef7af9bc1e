import type { CellValue, PredicateDoc, Scalar } from "./types.js";

/**
 * Text for one computed value. Collected lists render as {a, b}.
 *
 * Values are display-only on this side: they are converted with String and
 * never recomputed, so the grid always shows exactly what the service sent.
 */
export function formatValue(value: CellValue): string {
  if (Array.isArray(value)) {
    return "{" + value.map((v) => String(v)).join(", ") + "}";
  }
  return String(value);
}

/** Text for one cell: a parenthesized tuple, one entry per measure. */
export function formatCell(values: CellValue[] | undefined): string {
  if (values === undefined) {
    return "";
  }
  return "(" + values.map(formatValue).join(", ") + ")";
}

/** Literal in footer form: strings quoted, numbers bare, lists parenthesized. */
export function renderLiteral(literal: Scalar | Scalar[]): string {
  if (Array.isArray(literal)) {
    return "(" + literal.map((v) => renderLiteral(v)).join(", ") + ")";
  }
  if (typeof literal === "string") {
    const escaped = literal.replace(/\\/g, "\\\\").replace(/"/g, '\\"');
    return `"${escaped}"`;
  }
  return String(literal);
}

/** One restriction line, matching the footer of the text rendering. */
export function renderPredicate(pred: PredicateDoc): string {
  const lhs = `${pred.dim}.${pred.param}`;
  if (pred.op === "in") {
    return `${lhs} in ${renderLiteral(pred.literal)}`;
  }
  return `${lhs}${pred.op}${renderLiteral(pred.literal)}`;
}

/** A typed literal from form input: numeric text becomes a number. */
export function parseLiteral(text: string): Scalar {
  const trimmed = text.trim();
  if (/^-?\d+$/.test(trimmed)) {
    return Number(trimmed);
  }
  if (/^-?\d+\.\d+$/.test(trimmed)) {
    return Number(trimmed);
  }
  return trimmed;
}

/** A comma-separated list of literals, for membership restrictions. */
export function parseLiteralList(text: string): Scalar[] {
  return text
    .split(",")
    .map((part) => part.trim())
    .filter((part) => part.length > 0)
    .map(parseLiteral);
}
