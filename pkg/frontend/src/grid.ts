import { formatCell, renderPredicate } from "./format.js";
import type { NTableDoc, Scalar } from "./types.js";

export type AxisKind = "col" | "row";

/** Fired when an axis header is clicked, with the header element clicked. */
export type AxisHandler = (axis: AxisKind, anchor: HTMLElement) => void;

function cellKey(row: Scalar, col: Scalar): string {
  return JSON.stringify([row, col]);
}

function element<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const el = doc.createElement(tag);
  el.className = className;
  if (text !== undefined) {
    el.textContent = text;
  }
  return el;
}

/** The three caption lines above the grid: fact, column axis, row axis. */
export function buildCaption(owner: Document, doc: NTableDoc): HTMLElement {
  const caption = element(owner, "div", "caption");
  caption.append(
    element(owner, "div", "caption-fact", `${doc.fact}: ${doc.measures.join(", ")}`),
    element(
      owner,
      "div",
      "caption-cols",
      `columns: ${doc.colAxis.dim} / ${doc.colAxis.hier} @ ${doc.colAxis.level}`,
    ),
    element(
      owner,
      "div",
      "caption-rows",
      `rows: ${doc.rowAxis.dim} / ${doc.rowAxis.hier} @ ${doc.rowAxis.level}`,
    ),
  );
  return caption;
}

/**
 * The value grid. Headers carry the axis they belong to and call back on
 * click so the application can offer the levels reachable from that axis.
 */
export function buildGrid(
  owner: Document,
  doc: NTableDoc,
  onAxis: AxisHandler,
): HTMLTableElement {
  const byPair = new Map<string, string>();
  for (const cell of doc.cells) {
    byPair.set(cellKey(cell.row, cell.col), formatCell(cell.values));
  }

  const table = element(owner, "table", "grid");
  const head = owner.createElement("thead");
  const headRow = owner.createElement("tr");
  const corner = element(owner, "th", "corner", doc.rowAxis.level);
  headRow.append(corner);
  for (const value of doc.colAxis.values) {
    const th = element(owner, "th", "col-header", String(value));
    th.dataset.axis = "col";
    th.dataset.value = String(value);
    th.addEventListener("click", () => onAxis("col", th));
    headRow.append(th);
  }
  head.append(headRow);
  table.append(head);

  const body = owner.createElement("tbody");
  for (const rowValue of doc.rowAxis.values) {
    const tr = owner.createElement("tr");
    const th = element(owner, "th", "row-header", String(rowValue));
    th.dataset.axis = "row";
    th.dataset.value = String(rowValue);
    th.addEventListener("click", () => onAxis("row", th));
    tr.append(th);
    for (const colValue of doc.colAxis.values) {
      const td = element(
        owner,
        "td",
        "cell",
        byPair.get(cellKey(rowValue, colValue)) ?? "",
      );
      td.dataset.row = String(rowValue);
      td.dataset.col = String(colValue);
      tr.append(td);
    }
    body.append(tr);
  }
  table.append(body);
  return table;
}

/** The restriction footer, one line per accumulated predicate. */
export function buildFooter(owner: Document, doc: NTableDoc): HTMLElement {
  const footer = element(owner, "div", "footer");
  for (const pred of doc.footer) {
    footer.append(element(owner, "div", "restriction", renderPredicate(pred)));
  }
  return footer;
}
