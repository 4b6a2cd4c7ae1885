import { Mark, Scene, fmt } from "./scene";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function renderMark(mark: Mark): string {
  switch (mark.kind) {
    case "rect":
      return `<rect x="${fmt(mark.x)}" y="${fmt(mark.y)}" width="${fmt(mark.w)}" height="${fmt(mark.h)}" fill="${mark.fill}"/>`;
    case "frame":
      return `<rect x="${fmt(mark.x)}" y="${fmt(mark.y)}" width="${fmt(mark.w)}" height="${fmt(mark.h)}" fill="none" stroke="${mark.stroke}" stroke-width="1"/>`;
    case "line":
      return `<line x1="${fmt(mark.x1)}" y1="${fmt(mark.y1)}" x2="${fmt(mark.x2)}" y2="${fmt(mark.y2)}" stroke="${mark.stroke}" stroke-width="1"/>`;
    case "polyline": {
      const pts = mark.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return `<polyline points="${pts}" fill="none" stroke="${mark.stroke}" stroke-width="1.5"/>`;
    }
    case "square": {
      const half = mark.size / 2;
      return `<rect x="${fmt(mark.x - half)}" y="${fmt(mark.y - half)}" width="${fmt(mark.size)}" height="${fmt(mark.size)}" fill="${mark.fill}"/>`;
    }
    case "text":
      return `<text x="${fmt(mark.x)}" y="${fmt(mark.y)}" font-size="${fmt(mark.size)}" font-family="sans-serif" fill="${mark.fill}" text-anchor="${mark.anchor}">${esc(mark.text)}</text>`;
    case "group":
      return `<g class="${esc(mark.cls)}">${mark.children.map(renderMark).join("")}</g>`;
  }
}

export function renderSvg(scene: Scene): string {
  const body = scene.marks.map(renderMark).join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" ` +
    `viewBox="0 0 ${scene.width} ${scene.height}">\n` +
    `<rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>\n` +
    body +
    "\n</svg>\n"
  );
}
