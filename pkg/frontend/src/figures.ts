/**
 * Figure assembly: turns schema v1 record sets into chart specs.
 *
 * All figures are read-only views of the experiment outputs; nothing here
 * computes bounds or rates.
 */

import {
  BracketRecord,
  RateRecord,
  TailFit,
  TailRecord,
} from "./schema.js";
import { buildChart, chooseScale, Scale, Series } from "./svg.js";

const COLORS = {
  lower: "#d62728",
  upper: "#1f77b4",
  center: "#2ca02c",
  scaleUpper: "#9467bd",
  scaleLower: "#8c564b",
  annealed: "#7f7f7f",
  censored: "#b00",
  envelope: "#ff7f0e",
};

function negLog(v: number | null): number {
  if (v === null || !(v > 0)) return NaN;
  return -Math.log(v);
}

/**
 * Decay-rate bracket: -log of lower/upper bounds and the oracle (or MC)
 * estimate against t, with the predicted exponent scales dashed.
 * On the -log axis the lower bound plots above the upper bound.
 */
export function renderBracket(records: BracketRecord[]): string {
  const sorted = [...records].sort((a, b) => a.t - b.t || a.envSeed.localeCompare(b.envSeed));
  const ts = sorted.map((r) => r.t);
  const series: Series[] = [
    { label: "-log lower bound", x: ts, y: sorted.map((r) => negLog(r.lower)), color: COLORS.lower },
    {
      label: "-log estimate (oracle/MC)",
      x: ts,
      y: sorted.map((r) => negLog(r.oracle ?? r.mcEstimate)),
      color: COLORS.center,
    },
    { label: "-log upper bound", x: ts, y: sorted.map((r) => negLog(r.upper)), color: COLORS.upper },
    {
      label: "scale t/M+(t)",
      x: ts,
      y: sorted.map((r) => r.expQuenchedUpperScale ?? NaN),
      color: COLORS.scaleUpper,
      dash: "6,3",
      marker: "none",
    },
    {
      label: "scale t/M-(t)",
      x: ts,
      y: sorted.map((r) => r.expQuenchedLowerScale ?? NaN),
      color: COLORS.scaleLower,
      dash: "6,3",
      marker: "none",
    },
    {
      label: "scale t/h(t)",
      x: ts,
      y: sorted.map((r) => r.expAnnealed ?? NaN),
      color: COLORS.annealed,
      dash: "2,3",
      marker: "none",
    },
  ];
  const allY = series.flatMap((s) => s.y);
  const yScale: Scale = chooseScale(allY);
  const annotations = records.length === 0 ? ["no records in input"] : undefined;
  return buildChart({
    title: "Slowdown probability bracket",
    xLabel: "t",
    yLabel: "-log probability",
    xScale: "linear",
    yScale,
    series,
    annotations,
  });
}

/**
 * Tail-sum decay: -log p-hat against g(delta n), or against n on log axes
 * for a polynomial-tail fit; censored cells are marked with crosses at
 * their interval upper bound.
 */
export function renderTailEnvelope(records: TailRecord[], fit?: TailFit): string {
  const pareto = fit?.law.variant === "pareto";
  const usable = records.filter((r) => !r.censored);
  const censored = records.filter((r) => r.censored);
  const xOf = (r: TailRecord) => (pareto ? r.n : r.gDeltaN);

  const series: Series[] = [
    {
      label: "-log p-hat",
      x: usable.map(xOf),
      y: usable.map((r) => negLog(r.pHat)),
      color: COLORS.center,
    },
  ];
  if (censored.length > 0) {
    series.push({
      label: "censored (interval upper bound)",
      x: censored.map(xOf),
      y: censored.map((r) => negLog(r.ciHi)),
      color: COLORS.censored,
      line: false,
      marker: "cross",
      extraClass: "censored",
    });
  }

  const annotations: string[] = [];
  if (records.length === 0) annotations.push("no records in input");
  let slopeNote = "";
  if (pareto && fit?.envelope_c !== undefined && fit.law.params.alpha !== undefined) {
    const alpha = fit.law.params.alpha;
    const xs = records.map(xOf).filter((v) => v > 0);
    if (xs.length >= 2) {
      const grid = [Math.min(...xs), Math.max(...xs)];
      series.push({
        label: `envelope C n^(1-${alpha}) , C=${fit.envelope_c.toPrecision(4)}`,
        x: grid,
        y: grid.map((n) => -Math.log(fit.envelope_c as number) + (alpha - 1) * Math.log(n)),
        color: COLORS.envelope,
        dash: "6,3",
        marker: "none",
        extraClass: "envelope",
      });
    }
    if (fit.log_slope !== undefined) {
      slopeNote = `fitted slope ${fit.log_slope.toPrecision(6)}`;
      series[series.length - 1].label += ` | ${slopeNote}`;
    }
  }

  const yScale = chooseScale(series.flatMap((s) => s.y));
  return buildChart({
    title: "Weighted tail-sum decay",
    xLabel: pareto ? "n" : "g(delta n)",
    yLabel: "-log probability",
    xScale: pareto ? "log" : "linear",
    yScale,
    series,
    annotations: annotations.length > 0 ? annotations : undefined,
  });
}

/** h(t) against the quenched scale menu M(t), log-log. */
export function renderHRatio(records: RateRecord[]): string {
  const sorted = [...records].sort((a, b) => a.t - b.t);
  const ts = sorted.map((r) => r.t);
  const series: Series[] = [
    { label: "h(t)", x: ts, y: sorted.map((r) => r.h), color: COLORS.center },
  ];
  const modeColors: Record<string, string> = {
    g_inv_minus: COLORS.scaleLower,
    g_inv_plus: COLORS.scaleUpper,
    g_inv: COLORS.annealed,
  };
  for (const [mode, color] of Object.entries(modeColors)) {
    const y = sorted.map((r) => r.m[mode] ?? NaN);
    if (y.some((v) => Number.isFinite(v))) {
      series.push({ label: `M(t): ${mode}`, x: ts, y, color, dash: "5,3", marker: "none" });
    }
  }
  const annotations = records.length === 0 ? ["no records in input"] : undefined;
  return buildChart({
    title: "Annealed scale h(t) vs quenched scale menu",
    xLabel: "t",
    yLabel: "scale",
    xScale: "log",
    yScale: "log",
    series,
    annotations,
  });
}

/** Extreme-value bands u_rho / v_c around the typical maximum, log-log. */
export function renderMaxBands(records: RateRecord[]): string {
  const sorted = [...records].sort((a, b) => a.t - b.t);
  const ts = sorted.map((r) => r.t);
  const series: Series[] = [
    {
      label: "upper band u_rho(t)",
      x: ts,
      y: sorted.map((r) => r.m.u_rho ?? NaN),
      color: COLORS.upper,
    },
    {
      label: "lower band v_c(t)",
      x: ts,
      y: sorted.map((r) => r.m.v_c ?? NaN),
      color: COLORS.lower,
    },
    {
      label: "typical max g_inv(log t)+",
      x: ts,
      y: sorted.map((r) => r.m.g_inv_plus ?? NaN),
      color: COLORS.annealed,
      dash: "4,3",
      marker: "none",
    },
  ];
  const anyBand = sorted.some((r) => r.m.u_rho !== null || r.m.v_c !== null);
  const annotations: string[] = [];
  if (records.length === 0) annotations.push("no records in input");
  else if (!anyBand) annotations.push("bands not applicable to this law");
  return buildChart({
    title: "Extreme-value bands for the running maximum",
    xLabel: "t",
    yLabel: "band value",
    xScale: "log",
    yScale: "log",
    series,
    annotations: annotations.length > 0 ? annotations : undefined,
  });
}
