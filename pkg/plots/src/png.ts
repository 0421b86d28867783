import { deflateSync } from 'zlib'
import type { Primitive, Scene } from './scene.js'

/** Tiny software rasterizer plus a from-scratch PNG encoder -- keeps the
 * renderer dependency-free while still honoring .png outputs. */

// 5x7 glyph rows (top to bottom), 5-bit masks, MSB = left column.
const GLYPHS: Record<string, number[]> = {
  ' ': [0, 0, 0, 0, 0, 0, 0],
  '0': [14, 17, 19, 21, 25, 17, 14],
  '1': [4, 12, 4, 4, 4, 4, 14],
  '2': [14, 17, 1, 2, 4, 8, 31],
  '3': [31, 2, 4, 2, 1, 17, 14],
  '4': [2, 6, 10, 18, 31, 2, 2],
  '5': [31, 16, 30, 1, 1, 17, 14],
  '6': [6, 8, 16, 30, 17, 17, 14],
  '7': [31, 1, 2, 4, 8, 8, 8],
  '8': [14, 17, 17, 14, 17, 17, 14],
  '9': [14, 17, 17, 15, 1, 2, 12],
  A: [14, 17, 17, 31, 17, 17, 17],
  B: [30, 17, 17, 30, 17, 17, 30],
  C: [14, 17, 16, 16, 16, 17, 14],
  D: [28, 18, 17, 17, 17, 18, 28],
  E: [31, 16, 16, 30, 16, 16, 31],
  F: [31, 16, 16, 30, 16, 16, 16],
  G: [14, 17, 16, 23, 17, 17, 15],
  H: [17, 17, 17, 31, 17, 17, 17],
  I: [14, 4, 4, 4, 4, 4, 14],
  J: [7, 2, 2, 2, 2, 18, 12],
  K: [17, 18, 20, 24, 20, 18, 17],
  L: [16, 16, 16, 16, 16, 16, 31],
  M: [17, 27, 21, 21, 17, 17, 17],
  N: [17, 25, 21, 19, 17, 17, 17],
  O: [14, 17, 17, 17, 17, 17, 14],
  P: [30, 17, 17, 30, 16, 16, 16],
  Q: [14, 17, 17, 17, 21, 18, 13],
  R: [30, 17, 17, 30, 20, 18, 17],
  S: [15, 16, 16, 14, 1, 1, 30],
  T: [31, 4, 4, 4, 4, 4, 4],
  U: [17, 17, 17, 17, 17, 17, 14],
  V: [17, 17, 17, 17, 17, 10, 4],
  W: [17, 17, 17, 21, 21, 21, 10],
  X: [17, 17, 10, 4, 10, 17, 17],
  Y: [17, 17, 10, 4, 4, 4, 4],
  Z: [31, 1, 2, 4, 8, 16, 31],
  '.': [0, 0, 0, 0, 0, 12, 12],
  ',': [0, 0, 0, 0, 12, 4, 8],
  '-': [0, 0, 0, 31, 0, 0, 0],
  '+': [0, 4, 4, 31, 4, 4, 0],
  '=': [0, 0, 31, 0, 31, 0, 0],
  '(': [2, 4, 8, 8, 8, 4, 2],
  ')': [8, 4, 2, 2, 2, 4, 8],
  '/': [1, 1, 2, 4, 8, 16, 16],
  ':': [0, 12, 12, 0, 12, 12, 0],
  _: [0, 0, 0, 0, 0, 0, 31],
  '*': [0, 21, 14, 31, 14, 21, 0],
  '^': [4, 10, 17, 0, 0, 0, 0],
  '|': [4, 4, 4, 4, 4, 4, 4],
  '~': [0, 0, 8, 21, 2, 0, 0],
  '%': [25, 26, 2, 4, 8, 11, 19],
}

const NAMED: Record<string, [number, number, number]> = {
  white: [255, 255, 255],
  black: [0, 0, 0],
  none: [255, 255, 255],
}

function parseColor(color: string): [number, number, number] {
  if (color.startsWith('#')) {
    const hex = color.slice(1)
    const full = hex.length === 3 ? hex.split('').map((c) => c + c).join('') : hex
    return [parseInt(full.slice(0, 2), 16), parseInt(full.slice(2, 4), 16), parseInt(full.slice(4, 6), 16)]
  }
  return NAMED[color] ?? [0, 0, 0]
}

class Raster {
  data: Uint8Array
  constructor(readonly width: number, readonly height: number, background: string) {
    this.data = new Uint8Array(width * height * 3)
    const [r, g, b] = parseColor(background)
    for (let i = 0; i < width * height; i++) {
      this.data[3 * i] = r
      this.data[3 * i + 1] = g
      this.data[3 * i + 2] = b
    }
  }

  blend(x: number, y: number, rgb: [number, number, number], alpha: number): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return
    const i = 3 * (y * this.width + x)
    for (let c = 0; c < 3; c++) {
      this.data[i + c] = Math.round(alpha * rgb[c] + (1 - alpha) * this.data[i + c])
    }
  }

  pen(x: number, y: number, rgb: [number, number, number], width: number): void {
    const r = Math.max(0, Math.floor(width / 2))
    for (let dy = -r; dy <= r; dy++) {
      for (let dx = -r; dx <= r; dx++) this.blend(x + dx, y + dy, rgb, 1)
    }
  }

  line(x1: number, y1: number, x2: number, y2: number, color: string, width = 1.5, dash = false): void {
    const rgb = parseColor(color)
    const steps = Math.max(1, Math.ceil(Math.hypot(x2 - x1, y2 - y1)))
    const w = Math.round(width)
    for (let s = 0; s <= steps; s++) {
      if (dash && Math.floor(s / 6) % 2 === 1) continue
      const t = s / steps
      this.pen(Math.round(x1 + t * (x2 - x1)), Math.round(y1 + t * (y2 - y1)), rgb, w)
    }
  }

  polygon(points: Array<[number, number]>, fill: string, opacity = 1): void {
    const rgb = parseColor(fill)
    const ys = points.map((p) => p[1])
    const y0 = Math.max(0, Math.floor(Math.min(...ys)))
    const y1 = Math.min(this.height - 1, Math.ceil(Math.max(...ys)))
    for (let y = y0; y <= y1; y++) {
      const xs: number[] = []
      for (let i = 0; i < points.length; i++) {
        const [ax, ay] = points[i]
        const [bx, by] = points[(i + 1) % points.length]
        if (ay === by) continue
        const [lo, hi] = ay < by ? [ay, by] : [by, ay]
        if (y + 0.5 >= lo && y + 0.5 < hi) {
          xs.push(ax + ((y + 0.5 - ay) / (by - ay)) * (bx - ax))
        }
      }
      xs.sort((a, b) => a - b)
      for (let i = 0; i + 1 < xs.length; i += 2) {
        for (let x = Math.max(0, Math.round(xs[i])); x <= Math.min(this.width - 1, Math.round(xs[i + 1])); x++) {
          this.blend(x, y, rgb, opacity)
        }
      }
    }
  }

  circle(cx: number, cy: number, r: number, fill: string): void {
    const rgb = parseColor(fill)
    for (let y = Math.floor(cy - r); y <= Math.ceil(cy + r); y++) {
      for (let x = Math.floor(cx - r); x <= Math.ceil(cx + r); x++) {
        if ((x - cx) ** 2 + (y - cy) ** 2 <= r * r) this.blend(x, y, rgb, 1)
      }
    }
  }

  text(x: number, y: number, content: string, color: string, size = 12, anchor: 'start' | 'middle' | 'end' = 'start'): void {
    const rgb = parseColor(color)
    const scale = Math.max(1, Math.round(size / 10))
    const advance = 6 * scale
    const total = content.length * advance
    let px = Math.round(anchor === 'middle' ? x - total / 2 : anchor === 'end' ? x - total : x)
    const top = Math.round(y - 7 * scale) // y is the text baseline
    for (const ch of content) {
      const glyph = GLYPHS[ch] ?? GLYPHS[ch.toUpperCase()] ?? GLYPHS[' ']
      for (let row = 0; row < 7; row++) {
        for (let col = 0; col < 5; col++) {
          if ((glyph[row] >> (4 - col)) & 1) {
            for (let sy = 0; sy < scale; sy++) {
              for (let sx = 0; sx < scale; sx++) {
                this.blend(px + col * scale + sx, top + row * scale + sy, rgb, 1)
              }
            }
          }
        }
      }
      px += advance
    }
  }
}

function draw(raster: Raster, p: Primitive): void {
  switch (p.kind) {
    case 'line':
      raster.line(p.x1, p.y1, p.x2, p.y2, p.color, p.width ?? 1.5, p.dash ?? false)
      break
    case 'polyline':
      for (let i = 0; i + 1 < p.points.length; i++) {
        const [x1, y1] = p.points[i]
        const [x2, y2] = p.points[i + 1]
        raster.line(x1, y1, x2, y2, p.color, p.width ?? 1.5, p.dash ?? false)
      }
      break
    case 'rect':
      raster.polygon(
        [
          [p.x, p.y],
          [p.x + p.w, p.y],
          [p.x + p.w, p.y + p.h],
          [p.x, p.y + p.h],
        ],
        p.fill,
        p.opacity ?? 1,
      )
      break
    case 'polygon':
      raster.polygon(p.points, p.fill, p.opacity ?? 1)
      break
    case 'circle':
      raster.circle(p.cx, p.cy, p.r, p.fill)
      break
    case 'text':
      raster.text(p.x, p.y, p.text, p.color ?? '#000000', p.size ?? 12, p.anchor ?? 'start')
      break
  }
}

// -- PNG container -----------------------------------------------------------

const CRC_TABLE = (() => {
  const table = new Uint32Array(256)
  for (let n = 0; n < 256; n++) {
    let c = n
    for (let k = 0; k < 8; k++) c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1
    table[n] = c >>> 0
  }
  return table
})()

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff
  for (const byte of buf) c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8)
  return (c ^ 0xffffffff) >>> 0
}

function chunk(type: string, data: Uint8Array): Buffer {
  const head = Buffer.alloc(8)
  head.writeUInt32BE(data.length, 0)
  head.write(type, 4, 'ascii')
  const body = Buffer.concat([Buffer.from(type, 'ascii'), Buffer.from(data)])
  const tail = Buffer.alloc(4)
  tail.writeUInt32BE(crc32(body), 0)
  return Buffer.concat([head, Buffer.from(data), tail])
}

function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster
  const ihdr = Buffer.alloc(13)
  ihdr.writeUInt32BE(width, 0)
  ihdr.writeUInt32BE(height, 4)
  ihdr[8] = 8 // bit depth
  ihdr[9] = 2 // truecolor
  const raw = Buffer.alloc(height * (1 + width * 3))
  for (let y = 0; y < height; y++) {
    raw[y * (1 + width * 3)] = 0 // filter: none
    raw.set(data.subarray(y * width * 3, (y + 1) * width * 3), y * (1 + width * 3) + 1)
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk('IHDR', ihdr),
    chunk('IDAT', deflateSync(raw, { level: 9 })),
    chunk('IEND', new Uint8Array(0)),
  ])
}

export function sceneToPng(scene: Scene): Buffer {
  const raster = new Raster(scene.width, scene.height, scene.background)
  for (const p of scene.primitives) draw(raster, p)
  return encodePng(raster)
}
