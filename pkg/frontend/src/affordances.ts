import type { AxisDoc, CommandDoc, DimensionSummary, SchemaSummary } from "./types.js";

/** One level an axis can move to, with the operation that gets there. */
export interface LevelTarget {
  level: string;
  op: "drilldown" | "rollup";
}

export function dimension(summary: SchemaSummary, name: string): DimensionSummary | undefined {
  return summary.dimensions.find((d) => d.name === name);
}

/**
 * The levels reachable from an axis, finest first.
 *
 * Positions inside the current hierarchy decide the operation: a parameter
 * before the displayed one is a drill-down, a parameter after it a roll-up.
 * The displayed level itself is omitted.
 */
export function levelTargets(summary: SchemaSummary, axis: AxisDoc): LevelTarget[] {
  const dim = dimension(summary, axis.dim);
  const hier = dim?.hierarchies.find((h) => h.name === axis.hier);
  if (hier === undefined) {
    return [];
  }
  const here = hier.params.indexOf(axis.level);
  return hier.params
    .map((level, index): LevelTarget => ({
      level,
      op: index < here ? "drilldown" : "rollup",
    }))
    .filter((target) => target.level !== axis.level);
}

/** The command that moves an axis to one of its reachable levels. */
export function levelCommand(axis: AxisDoc, target: LevelTarget): CommandDoc {
  return { variant: target.op, dim: axis.dim, p: target.level };
}
