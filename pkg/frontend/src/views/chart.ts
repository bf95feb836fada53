/** Minimal dependency-free SVG line charts for the timeline view.
 * Every plotted value comes straight from an API bucket. */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface Series {
  name: string;
  values: (number | null)[];
}

export function renderLineChart(
  labels: string[],
  series: Series[],
  options: { width?: number; height?: number; min?: number; max?: number; className?: string } = {},
): SVGSVGElement {
  const width = options.width ?? 640;
  const height = options.height ?? 180;
  const pad = 28;
  const values = series.flatMap((s) => s.values.filter((v): v is number => v !== null));
  const max = options.max ?? Math.max(1, ...values);
  const min = options.min ?? Math.min(0, ...values);
  const span = max - min || 1;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("class", options.className ?? "chart");
  svg.setAttribute("role", "img");

  const x = (index: number) =>
    labels.length <= 1 ? width / 2 : pad + (index * (width - 2 * pad)) / (labels.length - 1);
  const y = (value: number) => height - pad - ((value - min) * (height - 2 * pad)) / span;

  const axis = document.createElementNS(SVG_NS, "line");
  axis.setAttribute("x1", String(pad));
  axis.setAttribute("y1", String(y(Math.max(min, 0))));
  axis.setAttribute("x2", String(width - pad));
  axis.setAttribute("y2", String(y(Math.max(min, 0))));
  axis.setAttribute("class", "axis");
  svg.append(axis);

  series.forEach((entry, seriesIndex) => {
    const polyline = document.createElementNS(SVG_NS, "polyline");
    const points = entry.values
      .map((value, index) => (value === null ? null : `${x(index).toFixed(1)},${y(value).toFixed(1)}`))
      .filter((p): p is string => p !== null)
      .join(" ");
    polyline.setAttribute("points", points);
    polyline.setAttribute("fill", "none");
    polyline.setAttribute("class", `series series-${seriesIndex}`);
    polyline.setAttribute("data-series", entry.name);
    svg.append(polyline);
    entry.values.forEach((value, index) => {
      if (value === null) return;
      const dot = document.createElementNS(SVG_NS, "circle");
      dot.setAttribute("cx", x(index).toFixed(1));
      dot.setAttribute("cy", y(value).toFixed(1));
      dot.setAttribute("r", "2.5");
      dot.setAttribute("class", `dot series-${seriesIndex}`);
      dot.setAttribute("data-series", entry.name);
      dot.setAttribute("data-label", labels[index]);
      dot.setAttribute("data-value", String(value));
      svg.append(dot);
    });
  });

  if (labels.length > 0) {
    const first = document.createElementNS(SVG_NS, "text");
    first.setAttribute("x", String(pad));
    first.setAttribute("y", String(height - 6));
    first.setAttribute("class", "tick");
    first.textContent = labels[0];
    svg.append(first);
    const last = document.createElementNS(SVG_NS, "text");
    last.setAttribute("x", String(width - pad));
    last.setAttribute("y", String(height - 6));
    last.setAttribute("text-anchor", "end");
    last.setAttribute("class", "tick");
    last.textContent = labels[labels.length - 1];
    svg.append(last);
  }
  return svg;
}
