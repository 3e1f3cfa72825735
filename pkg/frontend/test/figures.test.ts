import { join } from "path";
import { describe, expect, it } from "vitest";

import {
  renderBracket,
  renderHRatio,
  renderMaxBands,
  renderTailEnvelope,
} from "../src/figures.js";
import {
  bracketRecords,
  rateRecords,
  readSchemaFile,
  readTailFit,
  tailRecords,
} from "../src/schema.js";
import { chooseScale } from "../src/svg.js";

const FIX = join(__dirname, "fixtures");

function polylineYs(svg: string, label: string): number[] {
  const re = new RegExp(
    `<polyline[^>]*data-label="${label.replace(/[.*+?^${}()|[\]\\]/g, "\\$&")}"[^>]*points="([^"]+)"`,
  );
  const m = re.exec(svg);
  expect(m, `polyline "${label}" present`).toBeTruthy();
  return m![1].split(" ").map((p) => Number(p.split(",")[1]));
}

describe("bracket figure", () => {
  const records = bracketRecords(readSchemaFile(join(FIX, "quenched.csv")));
  const svg = renderBracket(records);

  it("draws the three bracket curves plus the scale overlays", () => {
    for (const label of ["-log lower bound", "-log upper bound", "-log estimate (oracle/MC)",
                         "scale t/M\\+\\(t\\)".replace(/\\/g, "")]) {
      expect(svg).toContain(`data-label="${label}"`);
    }
    // 3 rows in the fixture -> 3 points per bracket curve
    expect(polylineYs(svg, "-log lower bound")).toHaveLength(3);
  });

  it("orders the curves: lower bound above upper bound on the -log axis", () => {
    // SVG y grows downward, so "above" means smaller pixel y
    const lower = polylineYs(svg, "-log lower bound");
    const mid = polylineYs(svg, "-log estimate (oracle/MC)");
    const upper = polylineYs(svg, "-log upper bound");
    for (let i = 0; i < lower.length; i++) {
      expect(lower[i]).toBeLessThanOrEqual(mid[i] + 1e-6);
      expect(mid[i]).toBeLessThanOrEqual(upper[i] + 1e-6);
    }
  });

  it("switches to a log y-axis when values span more than 3 decades", () => {
    expect(chooseScale([1, 10, 999])).toBe("linear");
    expect(chooseScale([0.5, 501, 10000])).toBe("log");
    // the fixture spans -log(1.57e-8) ~ 18 vs -log(1) clipped, stays linear
    expect(svg).toContain('data-yscale=');
    // -log lower = 0.5, 20, 600: a span of three-plus decades
    const wide = records.map((r, i) => ({ ...r, lower: Math.exp(-[0.5, 20, 600][i]) }));
    expect(renderBracket(wide)).toContain('data-yscale="log"');
  });

  it("renders an empty-axes warning for an empty record set", () => {
    const svg0 = renderBracket([]);
    expect(svg0).toContain('class="annotation"');
    expect(svg0).toContain("no records in input");
  });
});

describe("tail envelope figure", () => {
  const fit = readTailFit(join(FIX, "tail_fit.json"));

  it("marks censored cells with a distinct marker", () => {
    const recs = tailRecords(readSchemaFile(join(FIX, "tail_censored.csv")));
    const svg = renderTailEnvelope(recs, fit);
    expect(svg).toContain('class="series censored"');
    expect(svg).toContain("censored (interval upper bound)");
  });

  it("reports the fitted slope from the fit file in the legend", () => {
    const recs = tailRecords(readSchemaFile(join(FIX, "tail.csv")));
    const svg = renderTailEnvelope(recs, fit);
    expect(svg).toContain(`fitted slope ${fit.log_slope!.toPrecision(6)}`);
    expect(svg).toContain('class="series envelope"');
  });

  it("uses log n on the x axis for a pareto fit", () => {
    const recs = tailRecords(readSchemaFile(join(FIX, "tail.csv")));
    expect(renderTailEnvelope(recs, fit)).toContain('data-xscale="log"');
    // without a fit the x axis falls back to g(delta n), linear
    expect(renderTailEnvelope(recs)).toContain('data-xscale="linear"');
  });

  it("renders an empty-axes warning for an empty record set", () => {
    const recs = tailRecords(readSchemaFile(join(FIX, "tail_empty.csv")));
    const svg = renderTailEnvelope(recs, fit);
    expect(svg).toContain("no records in input");
  });
});

describe("rate figures", () => {
  const recs = rateRecords(readSchemaFile(join(FIX, "rates.csv")));

  it("h-ratio draws h(t) on log-log axes", () => {
    const svg = renderHRatio(recs);
    expect(svg).toContain('data-label="h(t)"');
    expect(svg).toContain('data-xscale="log"');
    expect(svg).toContain('data-yscale="log"');
  });

  it("max-bands draws both bands for a pareto law", () => {
    const svg = renderMaxBands(recs);
    expect(svg).toContain("upper band u_rho(t)");
    expect(svg).toContain("lower band v_c(t)");
    expect(svg).not.toContain("bands not applicable");
  });

  it("max-bands warns when the bands do not apply", () => {
    const noBands = recs.map((r) => ({ ...r, m: { ...r.m, u_rho: null, v_c: null } }));
    expect(renderMaxBands(noBands)).toContain("bands not applicable");
  });
});
