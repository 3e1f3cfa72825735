/** Raster output: SVG string to PNG bytes via resvg. */

import { Resvg } from "@resvg/resvg-js";

export function renderPng(svg: string, width = 1440): Buffer {
  const resvg = new Resvg(svg, { fitTo: { mode: "width", value: width } });
  return resvg.render().asPng();
}
