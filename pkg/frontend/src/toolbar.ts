import { parseLiteral, parseLiteralList } from "./format.js";
import { dimension } from "./affordances.js";
import type { CommandDoc, NTableDoc, SchemaSummary } from "./types.js";

export interface ToolbarHandlers {
  apply(cmd: CommandDoc): void;
  undo(): void;
}

const COMPARISONS = ["=", "!=", "<", "<=", ">", ">=", "in"];

function option(owner: Document, value: string): HTMLOptionElement {
  const opt = owner.createElement("option");
  opt.value = value;
  opt.textContent = value;
  return opt;
}

function fill(select: HTMLSelectElement, values: string[]): void {
  const owner = select.ownerDocument;
  select.replaceChildren(...values.map((v) => option(owner, v)));
}

function picked(group: HTMLElement, selector: string): string {
  const el = group.querySelector<HTMLSelectElement>(selector);
  if (el === null) {
    throw new Error(`missing control ${selector}`);
  }
  return el.value;
}

function typed(group: HTMLElement, selector: string): string {
  const el = group.querySelector<HTMLInputElement>(selector);
  if (el === null) {
    throw new Error(`missing control ${selector}`);
  }
  return el.value;
}

interface GroupSpec {
  cls: string;
  legend: string;
  /** Adds this group's controls; returns the command the Apply click sends. */
  build(group: HTMLFieldSetElement): () => CommandDoc;
}

/**
 * The operation controls. Every choice is populated from the schema summary
 * and the current document, so the toolbar only offers names that exist.
 */
export function buildToolbar(
  owner: Document,
  summary: SchemaSummary,
  doc: NTableDoc,
  splits: string[],
  handlers: ToolbarHandlers,
): HTMLElement {
  const fact = summary.facts.find((f) => f.name === doc.fact);
  const linked = fact?.dimensions ?? [];
  const measures = doc.measures;
  const dims = summary.dimensions.map((d) => d.name);
  const otherFacts = summary.facts.map((f) => f.name).filter((n) => n !== doc.fact);

  const bar = owner.createElement("div");
  bar.className = "toolbar";

  const select = (group: HTMLElement, cls: string, values: string[]): HTMLSelectElement => {
    const el = owner.createElement("select");
    el.className = cls;
    fill(el, values);
    group.append(el);
    return el;
  };
  const input = (group: HTMLElement, cls: string, placeholder: string): HTMLInputElement => {
    const el = owner.createElement("input");
    el.className = cls;
    el.placeholder = placeholder;
    group.append(el);
    return el;
  };
  const attributesOf = (dim: string): string[] => dimension(summary, dim)?.attributes ?? [];
  const paramFollows = (dimSelect: HTMLSelectElement, paramSelect: HTMLSelectElement): void => {
    fill(paramSelect, attributesOf(dimSelect.value));
    dimSelect.addEventListener("change", () => fill(paramSelect, attributesOf(dimSelect.value)));
  };

  const specs: GroupSpec[] = [
    {
      cls: "op-drotate",
      legend: "DROTATE",
      build: (group) => {
        select(group, "a", linked);
        const b = select(group, "b", linked);
        if (linked.length > 1) {
          b.value = linked[1] as string;
        }
        return () => ({
          variant: "drotate",
          fact: doc.fact,
          d_a: picked(group, ".a"),
          d_b: picked(group, ".b"),
        });
      },
    },
    {
      cls: "op-hrotate",
      legend: "HROTATE",
      build: (group) => {
        const dim = select(group, "dim", dims);
        const hier = select(group, "hier", []);
        const hierarchiesOf = (name: string): string[] =>
          dimension(summary, name)?.hierarchies.map((h) => h.name) ?? [];
        fill(hier, hierarchiesOf(dim.value));
        dim.addEventListener("change", () => fill(hier, hierarchiesOf(dim.value)));
        return () => ({
          variant: "hrotate",
          dim: picked(group, ".dim"),
          hier: picked(group, ".hier"),
        });
      },
    },
    {
      cls: "op-frotate",
      legend: "FROTATE",
      build: (group) => {
        select(group, "fact", otherFacts);
        return () => ({
          variant: "frotate",
          f_a: doc.fact,
          f_b: picked(group, ".fact"),
        });
      },
    },
    {
      cls: "op-switch",
      legend: "SWITCH",
      build: (group) => {
        const dim = select(group, "dim", dims);
        const param = select(group, "param", []);
        paramFollows(dim, param);
        input(group, "v1", "first value");
        input(group, "v2", "second value");
        return () => ({
          variant: "switch",
          dim: picked(group, ".dim"),
          p: picked(group, ".param"),
          v1: parseLiteral(typed(group, ".v1")),
          v2: parseLiteral(typed(group, ".v2")),
        });
      },
    },
    {
      cls: "op-slice",
      legend: "SLICE",
      build: (group) => {
        const dim = select(group, "dim", dims);
        const param = select(group, "param", []);
        paramFollows(dim, param);
        select(group, "op", COMPARISONS);
        input(group, "value", "literal");
        return () => {
          const d = picked(group, ".dim");
          const op = picked(group, ".op");
          const raw = typed(group, ".value");
          return {
            variant: "slice",
            dim: d,
            preds: [
              {
                dim: d,
                param: picked(group, ".param"),
                op,
                literal: op === "in" ? parseLiteralList(raw) : parseLiteral(raw),
              },
            ],
          };
        };
      },
    },
    {
      cls: "op-push",
      legend: "PUSH",
      build: (group) => {
        const dim = select(group, "dim", linked);
        const param = select(group, "param", []);
        paramFollows(dim, param);
        return () => ({
          variant: "push",
          dim: picked(group, ".dim"),
          p: picked(group, ".param"),
          fact: doc.fact,
        });
      },
    },
    {
      cls: "op-pull",
      legend: "PULL",
      build: (group) => {
        select(group, "measure", measures);
        select(group, "dim", linked);
        return () => ({
          variant: "pull",
          fact: doc.fact,
          m: picked(group, ".measure"),
          dim: picked(group, ".dim"),
        });
      },
    },
    {
      cls: "op-split",
      legend: "SPLIT",
      build: (group) => {
        const dim = select(group, "dim", linked);
        const param = select(group, "param", []);
        paramFollows(dim, param);
        return () => ({
          variant: "split",
          dim: picked(group, ".dim"),
          p: picked(group, ".param"),
        });
      },
    },
    {
      cls: "op-combine",
      legend: "COMBINE",
      build: (group) => {
        const refs = [...splits, "current"];
        select(group, "kind", ["union", "intersect", "difference"]);
        select(group, "ref-a", refs);
        const b = select(group, "ref-b", refs);
        if (refs.length > 1) {
          b.value = refs[1] as string;
        }
        return () => ({
          variant: "combine",
          kind: picked(group, ".kind"),
          ref_a: picked(group, ".ref-a"),
          ref_b: picked(group, ".ref-b"),
        });
      },
    },
  ];

  for (const spec of specs) {
    const group = owner.createElement("fieldset");
    group.className = `group ${spec.cls}`;
    const legend = owner.createElement("legend");
    legend.textContent = spec.legend;
    group.append(legend);
    const command = spec.build(group);
    const apply = owner.createElement("button");
    apply.className = "apply";
    apply.textContent = "Apply";
    apply.addEventListener("click", () => handlers.apply(command()));
    group.append(apply);
    bar.append(group);
  }

  const tsplit = owner.createElement("button");
  tsplit.className = "op-tsplit";
  tsplit.textContent = "TSPLIT";
  tsplit.addEventListener("click", () => handlers.apply({ variant: "tsplit" }));
  bar.append(tsplit);

  const undo = owner.createElement("button");
  undo.className = "op-undo";
  undo.textContent = "Undo";
  undo.addEventListener("click", () => handlers.undo());
  bar.append(undo);

  return bar;
}
