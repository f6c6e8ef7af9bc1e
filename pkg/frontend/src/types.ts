/** Shapes exchanged with the HTTP service. */

/** A scalar that can appear in a cell, a header, or a restriction. */
export type Scalar = string | number | boolean | null;

/** One value of a computed group: a scalar, or a collected list. */
export type CellValue = Scalar | Scalar[];

export interface AxisDoc {
  dim: string;
  hier: string;
  level: string;
  values: Scalar[];
}

export interface CellDoc {
  row: Scalar;
  col: Scalar;
  values: CellValue[];
}

export interface PredicateDoc {
  dim: string;
  param: string;
  op: string;
  literal: Scalar | Scalar[];
}

/** The interchange document for one rendered table. */
export interface NTableDoc {
  fact: string;
  measures: string[];
  colAxis: AxisDoc;
  rowAxis: AxisDoc;
  cells: CellDoc[];
  footer: PredicateDoc[];
}

export interface MeasureSummary {
  name: string;
  kind: string;
  agg: string;
}

export interface FactSummary {
  name: string;
  measures: MeasureSummary[];
  dimensions: string[];
}

export interface HierarchySummary {
  name: string;
  params: string[];
}

export interface DimensionSummary {
  name: string;
  key: string;
  attributes: string[];
  hierarchies: HierarchySummary[];
}

export interface SchemaSummary {
  name: string;
  facts: FactSummary[];
  dimensions: DimensionSummary[];
}

export interface SessionHandle {
  id: string;
  schema: string;
  created: string;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  location?: string;
}

/** A structured command document, as accepted by POST /sessions/{id}/op. */
export interface CommandDoc {
  variant: string;
  [field: string]: unknown;
}
