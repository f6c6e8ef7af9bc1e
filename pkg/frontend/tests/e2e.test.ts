import { spawn, type ChildProcess } from "node:child_process";
import { resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App } from "../src/app.js";

const PORT = 8600 + (process.pid % 100);
const BASE = `http://127.0.0.1:${PORT}`;
// vitest runs with the frontend directory as its working directory
const FIXTURE = resolve(process.cwd(), "../fixtures/channalyse");

let server: ChildProcess;
let serverLog = "";

async function waitForService(): Promise<void> {
  const deadline = Date.now() + 45_000;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/schemas`);
      if (response.ok) {
        return;
      }
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`service did not come up on ${BASE}\n${serverLog}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
}

beforeAll(async () => {
  server = spawn("constel", ["serve", "--port", String(PORT), "--data", FIXTURE], {
    stdio: ["ignore", "pipe", "pipe"],
  });
  server.stdout?.on("data", (chunk) => (serverLog += chunk));
  server.stderr?.on("data", (chunk) => (serverLog += chunk));
  await waitForService();
});

afterAll(() => {
  server.kill("SIGTERM");
});

function texts(root: HTMLElement, selector: string): string[] {
  return [...root.querySelectorAll(selector)].map((el) => el.textContent ?? "");
}

function cellText(root: HTMLElement, row: string, col: string): string {
  const td = root.querySelector(`td[data-row="${row}"][data-col="${col}"]`);
  expect(td, `cell (${row}, ${col})`).not.toBeNull();
  return td!.textContent ?? "";
}

function choose(root: HTMLElement, selector: string, value: string): void {
  const el = root.querySelector<HTMLSelectElement>(selector);
  expect(el, selector).not.toBeNull();
  el!.value = value;
  el!.dispatchEvent(new Event("change", { bubbles: true }));
}

function click(root: HTMLElement, selector: string): void {
  const el = root.querySelector<HTMLElement>(selector);
  expect(el, selector).not.toBeNull();
  el!.click();
}

async function restrict(
  app: App,
  root: HTMLElement,
  dim: string,
  param: string,
  value: string,
): Promise<void> {
  choose(root, ".op-slice .dim", dim);
  choose(root, ".op-slice .param", param);
  choose(root, ".op-slice .op", "=");
  root.querySelector<HTMLInputElement>(".op-slice .value")!.value = value;
  click(root, ".op-slice .apply");
  await app.settle();
}

async function freshApp(): Promise<{ app: App; root: HTMLElement }> {
  const root = document.createElement("div");
  document.body.append(root);
  const app = new App(root, { base: BASE, schema: "channalyse" });
  await app.start();
  return { app, root };
}

describe("pivot against a live service", () => {
  it("restricts to the reference table, drills down, and undoes", async () => {
    const { app, root } = await freshApp();

    expect(texts(root, ".caption-fact")[0]).toBe(
      "sale: total_sales, tax_amount, quantity",
    );
    expect(texts(root, ".caption-cols")[0]).toBe(
      "columns: shop / h_shop_channel @ branch_desc",
    );

    await restrict(app, root, "person", "position", "manager");
    await restrict(app, root, "product", "categ", "C1");
    await restrict(app, root, "date", "year", "2000");

    expect(texts(root, ".col-header")).toEqual(["BR1", "BR2", "BR3", "BR4"]);
    expect(texts(root, ".row-header")).toEqual(["PC1", "PC2", "PC3"]);
    expect(cellText(root, "PC1", "BR1")).toBe("(58, 6, 2)");
    expect(texts(root, ".restriction")).toEqual([
      'person.position="manager"',
      'product.categ="C1"',
      "date.year=2000",
    ]);

    const before = root.querySelector("table.grid")!.outerHTML;

    click(root, '.col-header[data-value="BR1"]');
    const item = root.querySelector<HTMLElement>(
      '.menu button[data-level="channel_class"]',
    );
    expect(item).not.toBeNull();
    expect(item!.dataset.op).toBe("drilldown");
    item!.click();
    await app.settle();

    expect(texts(root, ".caption-cols")[0]).toBe(
      "columns: shop / h_shop_channel @ channel_class",
    );
    expect(texts(root, ".col-header")).toHaveLength(8);
    expect(root.querySelector("table.grid")!.outerHTML).not.toBe(before);

    click(root, ".op-undo");
    await app.settle();
    expect(root.querySelector("table.grid")!.outerHTML).toBe(before);
    expect(cellText(root, "PC1", "BR1")).toBe("(58, 6, 2)");

    root.remove();
  });

  it("shows split results as tabs and surfaces errors without touching the grid", async () => {
    const { app, root } = await freshApp();

    click(root, ".op-tsplit");
    await app.settle();
    expect(texts(root, ".tab")).toEqual(["current", "sale", "purchase"]);
    expect(root.querySelector(".tab.active")!.textContent).toBe("sale");

    choose(root, ".op-split .dim", "product");
    choose(root, ".op-split .param", "categ");
    click(root, ".op-split .apply");
    await app.settle();

    expect(texts(root, ".tab")).toEqual(["current", "C1", "C2", "C3"]);
    expect(root.querySelector(".tab.active")!.textContent).toBe("C1");

    click(root, '.tab[data-ctx="C2"]');
    await app.settle();
    expect(texts(root, ".restriction")).toContain('product.categ="C2"');

    const before = root.querySelector("table.grid")!.outerHTML;
    await app.apply({ variant: "drilldown", dim: "shop", p: "year" });
    const toast = root.querySelector<HTMLElement>(".toast")!;
    expect(toast.hidden).toBe(false);
    expect(toast.textContent).toMatch(/^\w+: /);
    expect(root.querySelector("table.grid")!.outerHTML).toBe(before);

    root.remove();
  });
});
