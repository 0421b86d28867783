/** Resolution-independent primitive list shared by the SVG and PNG emitters. */

export type Primitive =
  | { kind: 'line'; x1: number; y1: number; x2: number; y2: number; color: string; width?: number; dash?: boolean }
  | { kind: 'polyline'; points: Array<[number, number]>; color: string; width?: number; dash?: boolean }
  | { kind: 'rect'; x: number; y: number; w: number; h: number; fill: string; opacity?: number }
  | { kind: 'polygon'; points: Array<[number, number]>; fill: string; opacity?: number }
  | { kind: 'circle'; cx: number; cy: number; r: number; fill: string }
  | { kind: 'text'; x: number; y: number; text: string; color?: string; size?: number; anchor?: 'start' | 'middle' | 'end' }

export interface Scene {
  width: number
  height: number
  background: string
  primitives: Primitive[]
}

export interface Style {
  width: number
  height: number
  marginLeft: number
  marginRight: number
  marginTop: number
  marginBottom: number
  colors: string[]
  background: string
}

export const DEFAULT_STYLE: Style = {
  width: 720,
  height: 480,
  marginLeft: 72,
  marginRight: 24,
  marginTop: 36,
  marginBottom: 52,
  colors: ['#2c6cf5', '#f05570', '#1a9e77', '#f4a037', '#7a52c7', '#4d4d4d'],
  background: '#ffffff',
}

export interface Frame {
  left: number
  right: number
  top: number
  bottom: number
}

export function frameOf(style: Style): Frame {
  return {
    left: style.marginLeft,
    right: style.width - style.marginRight,
    top: style.marginTop,
    bottom: style.height - style.marginBottom,
  }
}

/** Affine map from a data interval to a pixel interval. */
export function scaleLinear(d0: number, d1: number, p0: number, p1: number) {
  const span = d1 - d0 || 1
  return (v: number) => p0 + ((v - d0) / span) * (p1 - p0)
}

/** Symmetric log transform: linear inside |v| <= threshold, log outside. */
export function symlog(threshold: number) {
  const t = Math.max(threshold, Number.MIN_VALUE)
  return (v: number) => Math.sign(v) * Math.log10(1 + Math.abs(v) / t)
}

/** Round tick positions covering [lo, hi] at a 1/2/5 step. */
export function ticks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo]
  const raw = (hi - lo) / Math.max(count - 1, 1)
  const mag = Math.pow(10, Math.floor(Math.log10(raw)))
  const norm = raw / mag
  const step = (norm >= 5 ? 10 : norm >= 2.5 ? 5 : norm >= 1.5 ? 2 : 1) * mag
  const start = Math.ceil(lo / step) * step
  const out: number[] = []
  for (let v = start; v <= hi + 1e-12 * step; v += step) out.push(Number(v.toPrecision(12)))
  return out
}

export function formatTick(v: number): string {
  if (v === 0) return '0'
  const a = Math.abs(v)
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1)
  return Number(v.toPrecision(6)).toString()
}
