/**
 * Minimal PNG backend: rasterises a scene into 8-bit RGBA and encodes it
 * with zlib from the standard library.  Text marks are not rasterised
 * (labels are an SVG concern; PNG output is for quick previews).
 */

import * as zlib from "node:zlib";
import { Mark, Scene } from "./scene";

class Raster {
  data: Uint8Array;

  constructor(public width: number, public height: number) {
    this.data = new Uint8Array(width * height * 4);
  }

  set(x: number, y: number, rgb: [number, number, number]): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = (yi * this.width + xi) * 4;
    this.data[o] = rgb[0];
    this.data[o + 1] = rgb[1];
    this.data[o + 2] = rgb[2];
    this.data[o + 3] = 255;
  }

  fillRect(x: number, y: number, w: number, h: number, rgb: [number, number, number]): void {
    for (let yy = Math.max(0, Math.round(y)); yy < Math.min(this.height, Math.round(y + h)); yy++) {
      for (let xx = Math.max(0, Math.round(x)); xx < Math.min(this.width, Math.round(x + w)); xx++) {
        this.set(xx, yy, rgb);
      }
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, rgb: [number, number, number]): void {
    const steps = Math.max(Math.abs(x2 - x1), Math.abs(y2 - y1), 1);
    for (let i = 0; i <= steps; i++) {
      this.set(x1 + ((x2 - x1) * i) / steps, y1 + ((y2 - y1) * i) / steps, rgb);
    }
  }
}

function parseColor(c: string): [number, number, number] {
  if (c.startsWith("#") && c.length === 7) {
    return [parseInt(c.slice(1, 3), 16), parseInt(c.slice(3, 5), 16), parseInt(c.slice(5, 7), 16)];
  }
  return [0, 0, 0];
}

function drawMark(r: Raster, mark: Mark): void {
  switch (mark.kind) {
    case "rect":
      r.fillRect(mark.x, mark.y, mark.w, mark.h, parseColor(mark.fill));
      break;
    case "frame": {
      const c = parseColor(mark.stroke);
      r.line(mark.x, mark.y, mark.x + mark.w, mark.y, c);
      r.line(mark.x, mark.y + mark.h, mark.x + mark.w, mark.y + mark.h, c);
      r.line(mark.x, mark.y, mark.x, mark.y + mark.h, c);
      r.line(mark.x + mark.w, mark.y, mark.x + mark.w, mark.y + mark.h, c);
      break;
    }
    case "line":
      r.line(mark.x1, mark.y1, mark.x2, mark.y2, parseColor(mark.stroke));
      break;
    case "polyline": {
      const c = parseColor(mark.stroke);
      for (let i = 1; i < mark.points.length; i++) {
        const [x1, y1] = mark.points[i - 1];
        const [x2, y2] = mark.points[i];
        r.line(x1, y1, x2, y2, c);
      }
      break;
    }
    case "square":
      r.fillRect(mark.x - mark.size / 2, mark.y - mark.size / 2, mark.size, mark.size, parseColor(mark.fill));
      break;
    case "text":
      break; // labels live in the SVG output
    case "group":
      mark.children.forEach((m) => drawMark(r, m));
      break;
  }
}

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (const b of buf) c = CRC_TABLE[(c ^ b) & 0xff] ^ (c >>> 8);
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(data.length, 0);
  head.write(type, 4, "ascii");
  const body = Buffer.concat([head.subarray(4), Buffer.from(data)]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body), 0);
  return Buffer.concat([head.subarray(0, 4), body, crc]);
}

export function renderPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height);
  raster.fillRect(0, 0, scene.width, scene.height, parseColor(scene.background));
  scene.marks.forEach((m) => drawMark(raster, m));

  const stride = scene.width * 4;
  const raw = Buffer.alloc((stride + 1) * scene.height);
  for (let y = 0; y < scene.height; y++) {
    raw[y * (stride + 1)] = 0; // filter type 0 per scanline
    Buffer.from(raster.data.buffer, y * stride, stride).copy(raw, y * (stride + 1) + 1);
  }

  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(scene.width, 0);
  ihdr.writeUInt32BE(scene.height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // colour type RGBA
  const idat = zlib.deflateSync(raw, { level: 9 });
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}
