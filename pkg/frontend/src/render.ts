import * as echarts from "echarts";
import type { EChartsOption } from "echarts";

export interface RenderSize {
  width: number;
  height: number;
}

/** Render a chart option to an SVG string via the server-side renderer. */
export function renderSvg(option: EChartsOption, size: RenderSize): string {
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: size.width,
    height: size.height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}
