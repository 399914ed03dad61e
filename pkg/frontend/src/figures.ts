/**
 * Figure renderers over the harness CSV schema.
 *
 * Kinds:
 *   error-curves     log-y approximation error vs time, one curve per truncation
 *   trajectory-3d    isometric projection of actual vs desired flight path
 *   trajectory-axes  per-axis position vs time, actual vs desired
 *   control-actions  thrust and torque commands vs time
 *   residual         input-recovery relative residual vs time
 */

import { ResultTable, requireSeries, CsvSchemaError } from "./csv.js";
import { PALETTE, PanelSeries, renderPanel, svgDocument } from "./svg.js";

export type FigureKind =
  | "error-curves"
  | "trajectory-3d"
  | "trajectory-axes"
  | "control-actions"
  | "residual";

export interface PlotSpec {
  kind: FigureKind;
  /** quantity for error-curves (default e_nu_pct) */
  quantity?: string;
  yScale?: "linear" | "log";
  title?: string;
  width?: number;
}

const WIDTH = 720;

function zip(t: number[], v: number[]): Array<[number, number]> {
  return t.map((ti, i) => [ti, v[i]]);
}

/** Sort truncation labels numerically: nu2 < nu3 < nu10, nu1_z2 < nu1_z12. */
function truncationOrder(a: string, b: string): number {
  const nums = (s: string) => (s.match(/\d+/g) ?? []).map(Number);
  const na = nums(a);
  const nb = nums(b);
  for (let i = 0; i < Math.max(na.length, nb.length); i++) {
    const d = (na[i] ?? -1) - (nb[i] ?? -1);
    if (d !== 0) return d;
  }
  return a < b ? -1 : a > b ? 1 : 0;
}

function renderErrorCurves(table: ResultTable, spec: PlotSpec): string {
  // full-model runs carry the combined-chain error, which stays meaningful even
  // when the attitude block is exact (J = I makes e_nu identically zero)
  const fallback = table.quantities.includes("e_z_pct") ? "e_z_pct" : "e_nu_pct";
  const quantity = spec.quantity ?? fallback;
  const labels = [...table.truncations].sort(truncationOrder);
  const series: PanelSeries[] = labels.map((label, i) => {
    const s = requireSeries(table, label, quantity);
    return { label, color: PALETTE[i % PALETTE.length], points: zip(s.t, s.values) };
  });
  const { body, height } = renderPanel({
    title: spec.title ?? `approximation error (${quantity})`,
    xLabel: "t [s]",
    yLabel: quantity,
    yScale: spec.yScale ?? "log",
    series,
    width: spec.width ?? WIDTH,
  });
  return svgDocument([body], spec.width ?? WIDTH, height);
}

function quadXYZ(table: ResultTable, prefix: string): [number[], number[][], string] {
  const trunc = table.truncations[0];
  const x = requireSeries(table, trunc, `${prefix}_x`);
  const y = requireSeries(table, trunc, `${prefix}_y`);
  const z = requireSeries(table, trunc, `${prefix}_z`);
  return [x.t, [x.values, y.values, z.values], trunc];
}

function renderTrajectory3d(table: ResultTable, spec: PlotSpec): string {
  const [, act] = quadXYZ(table, "p");
  const [, des] = quadXYZ(table, "pd");
  const proj = (cols: number[][]) =>
    cols[0].map((_, i): [number, number] => {
      const [x, y, z] = [cols[0][i], cols[1][i], cols[2][i]];
      // isometric: screen-x = x - y/sqrt(2) scaled, screen-y = z + y/(2 sqrt(2))
      return [x - 0.7071 * 0.7 * y, z + 0.3536 * y];
    });
  const series: PanelSeries[] = [
    { label: "desired", color: "#888888", points: proj(des), dash: "6 4" },
    { label: "actual", color: PALETTE[0], points: proj(act) },
  ];
  const { body, height } = renderPanel({
    title: spec.title ?? "flight path (isometric projection)",
    xLabel: "x - 0.5 y [m]",
    yLabel: "z + 0.35 y [m]",
    yScale: "linear",
    series,
    width: spec.width ?? WIDTH,
    height: 420,
  });
  return svgDocument([body], spec.width ?? WIDTH, height);
}

function renderTrajectoryAxes(table: ResultTable, spec: PlotSpec): string {
  const [t, act] = quadXYZ(table, "p");
  const [, des] = quadXYZ(table, "pd");
  const bodies: string[] = [];
  let offset = 0;
  const H = 240;
  for (const [axis, name] of [[0, "x"], [1, "y"], [2, "z"]] as Array<[number, string]>) {
    const { body } = renderPanel(
      {
        title: `${name} position`,
        xLabel: axis === 2 ? "t [s]" : "",
        yLabel: `${name} [m]`,
        yScale: "linear",
        series: [
          { label: "desired", color: "#888888", points: zip(t, des[axis]), dash: "6 4" },
          { label: "actual", color: PALETTE[0], points: zip(t, act[axis]) },
        ],
        width: spec.width ?? WIDTH,
        height: H,
      },
      offset
    );
    bodies.push(body);
    offset += H;
  }
  return svgDocument(bodies, spec.width ?? WIDTH, offset);
}

function renderControlActions(table: ResultTable, spec: PlotSpec): string {
  const trunc = table.truncations[0];
  const thrust = requireSeries(table, trunc, "thrust");
  const bodies: string[] = [];
  const H = 280;
  const { body: b1 } = renderPanel({
    title: spec.title ?? "thrust command",
    xLabel: "",
    yLabel: "T [N]",
    yScale: "linear",
    series: [{ label: "T", color: PALETTE[0], points: zip(thrust.t, thrust.values) }],
    width: spec.width ?? WIDTH,
    height: H,
  });
  bodies.push(b1);
  const torques: PanelSeries[] = ["M_x", "M_y", "M_z"].map((q, i) => {
    const s = requireSeries(table, trunc, q);
    return { label: q, color: PALETTE[i + 1], points: zip(s.t, s.values) };
  });
  const { body: b2 } = renderPanel(
    {
      title: "torque commands",
      xLabel: "t [s]",
      yLabel: "M [N m]",
      yScale: "linear",
      series: torques,
      width: spec.width ?? WIDTH,
      height: H,
    },
    H
  );
  bodies.push(b2);
  return svgDocument(bodies, spec.width ?? WIDTH, 2 * H);
}

function renderResidual(table: ResultTable, spec: PlotSpec): string {
  const trunc = table.truncations[0];
  const s = requireSeries(table, trunc, "delta_bu_pct");
  const { body, height } = renderPanel({
    title: spec.title ?? "input-recovery relative residual",
    xLabel: "t [s]",
    yLabel: "delta_Bu",
    yScale: spec.yScale ?? "linear",
    series: [{ label: "delta_Bu", color: PALETTE[3], points: zip(s.t, s.values) }],
    width: spec.width ?? WIDTH,
  });
  return svgDocument([body], spec.width ?? WIDTH, height);
}

export function renderFigure(table: ResultTable, spec: PlotSpec): string {
  switch (spec.kind) {
    case "error-curves":
      return renderErrorCurves(table, spec);
    case "trajectory-3d":
      return renderTrajectory3d(table, spec);
    case "trajectory-axes":
      return renderTrajectoryAxes(table, spec);
    case "control-actions":
      return renderControlActions(table, spec);
    case "residual":
      return renderResidual(table, spec);
    default:
      throw new CsvSchemaError(`unknown figure kind "${(spec as PlotSpec).kind}"`);
  }
}
