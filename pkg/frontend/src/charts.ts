import type { EChartsOption, SeriesOption } from "echarts";
import { AggregateRow, DatasetSeries } from "./csv";

export class EmptySelectionError extends Error {}

export type FigureKind = "data" | "lambda" | "theory" | "eps" | "delta" | "size";

export interface BuiltChart {
  option: EChartsOption;
  /** Logical (legend-visible) series names, one per plotted group. */
  seriesNames: string[];
}

const ALGO_LABELS: Record<string, string> = {
  nonprivate: "nonprivate",
  dpsc_out: "DPSC_out",
  dpsc_obj: "DPSC_obj",
};

const ALGO_COLORS: Record<string, string> = {
  nonprivate: "#4063d8",
  dpsc_out: "#389826",
  dpsc_obj: "#e66f2f",
};

const FALLBACK_COLORS = ["#9558b2", "#cb3c33", "#0097a7", "#8d6e63", "#607d8b"];

function epsTotal(row: AggregateRow): number | null {
  if (row.eps1 === null || row.eps2 === null) return null;
  return row.eps1 + row.eps2;
}

interface Group {
  label: string;
  color: string;
  points: { x: number; mean: number; half: number; bound: number | null }[];
}

/**
 * Group rows for a given x-axis column, labeling each group by the columns
 * that actually vary across the selection (so a single-dataset sweep keeps
 * plain algorithm names in the legend).
 */
function groupRows(
  rows: AggregateRow[],
  x: (row: AggregateRow) => number | null,
  labelParts: {
    value: (row: AggregateRow) => string | null;
    always?: boolean;
  }[],
): Group[] {
  const usable = rows.filter((row) => x(row) !== null);
  if (usable.length === 0) throw new EmptySelectionError("empty selection: no plottable rows");
  const varying = labelParts.filter((part) => {
    if (part.always) return true;
    const seen = new Set(
      usable.map((row) => part.value(row)).filter((value) => value !== null),
    );
    return seen.size > 1;
  });
  const groups = new Map<string, Group>();
  let fallback = 0;
  for (const row of usable) {
    const label =
      varying
        .map((part) => part.value(row))
        .filter((piece) => piece !== null)
        .join(" ") || "series";
    let group = groups.get(label);
    if (!group) {
      const color =
        ALGO_COLORS[row.algorithm] ?? FALLBACK_COLORS[fallback++ % FALLBACK_COLORS.length];
      group = { label, color, points: [] };
      groups.set(label, group);
    }
    group.points.push({
      x: x(row) as number,
      mean: row.mean_rmse_post,
      half: row.ci_half_width,
      bound: row.theory_bound,
    });
  }
  for (const group of groups.values()) {
    group.points.sort((a, b) => a.x - b.x);
  }
  return [...groups.values()];
}

function bandedSeries(group: Group): SeriesOption[] {
  return [
    {
      name: `${group.label}__lo`,
      type: "line",
      stack: group.label,
      data: group.points.map((p) => [p.x, p.mean - p.half]),
      lineStyle: { opacity: 0 },
      symbol: "none",
      silent: true,
      tooltip: { show: false },
    },
    {
      name: `${group.label}__band`,
      type: "line",
      stack: group.label,
      data: group.points.map((p) => [p.x, 2 * p.half]),
      lineStyle: { opacity: 0 },
      areaStyle: { opacity: 0.18, color: group.color },
      symbol: "none",
      silent: true,
      tooltip: { show: false },
    },
    {
      name: group.label,
      type: "line",
      data: group.points.map((p) => [p.x, p.mean]),
      color: group.color,
      symbol: "circle",
      symbolSize: 5,
    },
  ];
}

function lineChart(groups: Group[], title: string, xName: string): BuiltChart {
  const names = groups.map((g) => g.label);
  return {
    option: {
      animation: false,
      title: { text: title, left: "center" },
      legend: { data: names, bottom: 0 },
      grid: { left: 70, right: 30, top: 50, bottom: 60 },
      xAxis: { type: "log", name: xName, nameLocation: "middle", nameGap: 28 },
      yAxis: { type: "value", name: "post-period RMSE" },
      series: groups.flatMap(bandedSeries),
    },
    seriesNames: names,
  };
}

const algorithmPart = {
  value: (row: AggregateRow) => ALGO_LABELS[row.algorithm] ?? row.algorithm,
  always: true,
};
const sizePart = { value: (row: AggregateRow) => `n=${row.n},t0=${row.t0}` };
const epsPart = {
  value: (row: AggregateRow) => {
    const total = epsTotal(row);
    return total === null ? null : `eps=${total}`;
  },
};
const lambdaPart = { value: (row: AggregateRow) => `lambda=${row.lambda}` };

export function buildLambdaChart(rows: AggregateRow[]): BuiltChart {
  const groups = groupRows(rows, (r) => r.lambda, [algorithmPart, sizePart, epsPart]);
  return lineChart(groups, "post-period RMSE vs regularization", "lambda");
}

export function buildEpsChart(rows: AggregateRow[]): BuiltChart {
  const groups = groupRows(
    rows.filter((r) => r.algorithm !== "nonprivate"),
    epsTotal,
    [algorithmPart, sizePart, lambdaPart],
  );
  return lineChart(groups, "post-period RMSE vs privacy budget", "eps (total)");
}

export function buildTheoryChart(rows: AggregateRow[]): BuiltChart {
  const withBounds = rows.filter((r) => r.theory_bound !== null && r.algorithm !== "nonprivate");
  const groups = groupRows(withBounds, (r) => r.lambda, [algorithmPart, sizePart, epsPart]);
  const series: SeriesOption[] = groups.flatMap((group) => [
    ...bandedSeries(group),
    {
      name: `${group.label} (bound)`,
      type: "line",
      data: group.points.map((p) => [p.x, p.bound]),
      color: group.color,
      lineStyle: { type: "dashed" },
      symbol: "none",
    },
  ]);
  const names = groups.flatMap((g) => [g.label, `${g.label} (bound)`]);
  return {
    option: {
      animation: false,
      title: { text: "theory bound vs empirical RMSE", left: "center" },
      legend: { data: names, bottom: 0 },
      grid: { left: 70, right: 30, top: 50, bottom: 60 },
      xAxis: { type: "log", name: "lambda", nameLocation: "middle", nameGap: 28 },
      yAxis: { type: "log", name: "post-period RMSE" },
      series,
    },
    seriesNames: names,
  };
}

export function buildDeltaChart(rows: AggregateRow[]): BuiltChart {
  const objective = rows.filter((r) => r.algorithm === "dpsc_obj");
  const familyPart = {
    value: (row: AggregateRow) =>
      row.delta !== null && row.delta > 0 ? `gaussian (delta=${row.delta})` : "laplace",
    always: true,
  };
  const groups = groupRows(objective, epsTotal, [familyPart, sizePart, lambdaPart]);
  return lineChart(groups, "objective noise families", "eps (total)");
}

export function buildSizeChart(rows: AggregateRow[]): BuiltChart {
  const groups = groupRows(rows, (r) => r.lambda, [
    { ...sizePart, always: true },
    algorithmPart,
    epsPart,
  ]);
  return lineChart(groups, "post-period RMSE across dataset sizes", "lambda");
}

export function buildDataChart(series: DatasetSeries[]): BuiltChart {
  if (series.length === 0) throw new EmptySelectionError("empty selection: no series in dataset");
  const T = series[0].values.length;
  const times = Array.from({ length: T }, (_, i) => i + 1);
  const donors = series.filter((s) => s.id !== "target");
  const target = series.filter((s) => s.id === "target");
  const chartSeries: SeriesOption[] = donors.map((s) => ({
    name: `donor ${s.id}`,
    type: "line",
    data: s.values,
    color: "#9e9e9e",
    lineStyle: { width: 1, opacity: 0.7 },
    symbol: "none",
    silent: true,
  }));
  for (const s of target) {
    chartSeries.push({
      name: "target",
      type: "line",
      data: s.values,
      color: "#cb3c33",
      lineStyle: { width: 2.5 },
      symbol: "none",
    });
  }
  const names = chartSeries.map((s) => s.name as string);
  return {
    option: {
      animation: false,
      title: { text: "donor pool and target", left: "center" },
      legend: { data: target.length > 0 ? ["target"] : [], bottom: 0 },
      grid: { left: 70, right: 30, top: 50, bottom: 60 },
      xAxis: { type: "category", data: times, name: "t", nameLocation: "middle", nameGap: 28 },
      yAxis: { type: "value", name: "value" },
      series: chartSeries,
    },
    seriesNames: names,
  };
}

export function buildChart(
  kind: FigureKind,
  aggregates: AggregateRow[],
  dataset: DatasetSeries[],
): BuiltChart {
  switch (kind) {
    case "data":
      return buildDataChart(dataset);
    case "lambda":
      return buildLambdaChart(aggregates);
    case "theory":
      return buildTheoryChart(aggregates);
    case "eps":
      return buildEpsChart(aggregates);
    case "delta":
      return buildDeltaChart(aggregates);
    case "size":
      return buildSizeChart(aggregates);
  }
}
