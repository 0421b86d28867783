import { writeFileSync, readFileSync } from 'fs'
import { readCsv, requireColumns, SchemaError } from './csv.js'
import { decayRate } from './fit.js'
import {
  DEFAULT_STYLE,
  Frame,
  Primitive,
  Scene,
  Style,
  formatTick,
  frameOf,
  scaleLinear,
  symlog,
  ticks,
} from './scene.js'
import { sceneToPng } from './png.js'
import { sceneToSvg } from './svg.js'

export type PlotKind = 'flux_spectrum' | 'budget_timeseries' | 'uniqueness_envelope' | 'region_diagram'

export interface PlotJob {
  kind: PlotKind
  inputs: string[]
  output: string
  stylePath?: string
}

export interface RenderInfo {
  scene: Scene
  /** fitted exponential decay rates per input, budget_timeseries only */
  fittedRates?: number[]
}

const AXIS = '#333333'

function loadStyle(path?: string): Style {
  if (!path) return DEFAULT_STYLE
  const user = JSON.parse(readFileSync(path, 'utf8'))
  return { ...DEFAULT_STYLE, ...user }
}

function axes(frame: Frame, title: string, xLabel: string, yLabel: string): Primitive[] {
  return [
    { kind: 'line', x1: frame.left, y1: frame.bottom, x2: frame.right, y2: frame.bottom, color: AXIS },
    { kind: 'line', x1: frame.left, y1: frame.top, x2: frame.left, y2: frame.bottom, color: AXIS },
    { kind: 'text', x: (frame.left + frame.right) / 2, y: frame.top - 12, text: title, anchor: 'middle', size: 14 },
    { kind: 'text', x: (frame.left + frame.right) / 2, y: frame.bottom + 36, text: xLabel, anchor: 'middle' },
    { kind: 'text', x: frame.left - 56, y: frame.top - 12, text: yLabel },
  ]
}

function xTicks(frame: Frame, lo: number, hi: number, toPx: (v: number) => number): Primitive[] {
  const out: Primitive[] = []
  for (const v of ticks(lo, hi)) {
    const x = toPx(v)
    out.push({ kind: 'line', x1: x, y1: frame.bottom, x2: x, y2: frame.bottom + 4, color: AXIS })
    out.push({ kind: 'text', x, y: frame.bottom + 18, text: formatTick(v), anchor: 'middle', size: 10 })
  }
  return out
}

function yTicksAt(frame: Frame, values: number[], labels: string[], toPx: (v: number) => number): Primitive[] {
  const out: Primitive[] = []
  values.forEach((v, i) => {
    const y = toPx(v)
    out.push({ kind: 'line', x1: frame.left - 4, y1: y, x2: frame.left, y2: y, color: AXIS })
    out.push({ kind: 'text', x: frame.left - 8, y: y + 4, text: labels[i], anchor: 'end', size: 10 })
  })
  return out
}

// -- flux spectrum ------------------------------------------------------------

const FLUX_COLUMNS = ['Q', 'H_Q', 'Pi_Q', 'kernel_bound', 'beta_bound']

function fluxScene(job: PlotJob, style: Style): Scene {
  const table = requireColumns(readCsv(job.inputs[0]), FLUX_COLUMNS)
  const q = table.get('Q')!
  const series: Array<[string, number[]]> = [
    ['H_Q', table.get('H_Q')!],
    ['Pi_Q', table.get('Pi_Q')!],
    ['(K*b^2)^3/2', table.get('kernel_bound')!],
    ['(kappa*beta^2)^3/2', table.get('beta_bound')!],
  ]
  const frame = frameOf(style)
  // symlog guard: a flat-zero column still renders on the linear core
  const magnitudes = series.flatMap(([, v]) => v.map(Math.abs)).filter((m) => m > 0)
  const threshold = magnitudes.length ? Math.min(...magnitudes) * 0.5 : 1
  const tf = symlog(threshold)
  const values = series.flatMap(([, v]) => v.map(tf))
  const lo = Math.min(0, ...values)
  const hi = Math.max(0, ...values)
  const toX = scaleLinear(Math.min(...q), Math.max(...q), frame.left, frame.right)
  const toY = scaleLinear(lo, hi, frame.bottom, frame.top)
  const prims = axes(frame, 'truncated flux through shell Q (symlog)', 'Q', 'flux')
  prims.push(...xTicks(frame, Math.min(...q), Math.max(...q), toX))
  prims.push({ kind: 'line', x1: frame.left, y1: toY(0), x2: frame.right, y2: toY(0), color: '#bbbbbb', dash: true, width: 1 })
  prims.push(...yTicksAt(frame, [lo, 0, hi], [formatTick(lo), '0', formatTick(hi)], toY))
  series.forEach(([label, vals], i) => {
    const color = style.colors[i % style.colors.length]
    prims.push({
      kind: 'polyline',
      points: q.map((qv, j) => [toX(qv), toY(tf(vals[j]))] as [number, number]),
      color,
      dash: label.startsWith('('),
    })
    prims.push({ kind: 'text', x: frame.right - 8, y: frame.top + 16 + 14 * i, text: label, color, anchor: 'end', size: 10 })
  })
  return { width: style.width, height: style.height, background: style.background, primitives: prims }
}

// -- budget time series ---------------------------------------------------------

const BUDGET_COLUMNS = ['t', 'E', 'H', 'grad_l2', 'cum_dissipation', 'energy_ineq_residual']

function budgetScene(job: PlotJob, style: Style): RenderInfo {
  const frame = frameOf(style)
  const curves = job.inputs.map((path) => {
    const cols = requireColumns(readCsv(path), BUDGET_COLUMNS)
    return { path, t: cols.get('t')!, h: cols.get('H')! }
  })
  const allT = curves.flatMap((c) => c.t)
  const logAbs = (v: number) => Math.log10(Math.max(Math.abs(v), Number.MIN_VALUE))
  const allY = curves.flatMap((c) => c.h.map(logAbs))
  const toX = scaleLinear(Math.min(...allT), Math.max(...allT), frame.left, frame.right)
  const yLo = Math.min(...allY)
  const yHi = Math.max(...allY)
  const toY = scaleLinear(yLo, yHi === yLo ? yLo + 1 : yHi, frame.bottom, frame.top)
  const prims = axes(frame, 'helicity decay', 't', 'log10 |H|')
  prims.push(...xTicks(frame, Math.min(...allT), Math.max(...allT), toX))
  prims.push(...yTicksAt(frame, [yLo, yHi], [formatTick(yLo), formatTick(yHi)], toY))
  const rates: number[] = []
  curves.forEach((curve, i) => {
    const color = style.colors[i % style.colors.length]
    const rate = decayRate(curve.t, curve.h)
    rates.push(rate)
    prims.push({
      kind: 'polyline',
      points: curve.t.map((tv, j) => [toX(tv), toY(logAbs(curve.h[j]))] as [number, number]),
      color,
    })
    const name = curve.path.split('/').pop() ?? curve.path
    prims.push({
      kind: 'text',
      x: frame.left + 10,
      y: frame.top + 16 + 14 * i,
      text: `${name}: rate=${rate.toPrecision(4)}`,
      color,
      size: 10,
    })
  })
  return {
    scene: { width: style.width, height: style.height, background: style.background, primitives: prims },
    fittedRates: rates,
  }
}

// -- uniqueness envelope ---------------------------------------------------------

const UNIQUENESS_COLUMNS = ['t', 'Z_l2_sq', 'besov_time_norm', 'fitted_C', 'bound_ok']

function uniquenessScene(job: PlotJob, style: Style): Scene {
  const cols = requireColumns(readCsv(job.inputs[0]), UNIQUENESS_COLUMNS)
  const t = cols.get('t')!
  const z = cols.get('Z_l2_sq')!
  const w = cols.get('besov_time_norm')!
  const c = cols.get('fitted_C')![0]
  const ok = cols.get('bound_ok')!
  const floor = Number.MIN_VALUE
  const envelope = t.map((tv, i) => Math.max(z[0], floor) * Math.exp(c * (tv + w[i])))
  const logv = (v: number) => Math.log10(Math.max(v, floor))
  const frame = frameOf(style)
  const ys = [...z.map(logv), ...envelope.map(logv)]
  const yLo = Math.min(...ys)
  const yHi = Math.max(...ys)
  const toX = scaleLinear(Math.min(...t), Math.max(...t), frame.left, frame.right)
  const toY = scaleLinear(yLo, yHi === yLo ? yLo + 1 : yHi, frame.bottom, frame.top)
  const prims = axes(frame, `Gronwall envelope (fitted C=${c.toPrecision(4)})`, 't', 'log10 |Z|^2')
  prims.push(...xTicks(frame, Math.min(...t), Math.max(...t), toX))
  prims.push(...yTicksAt(frame, [yLo, yHi], [formatTick(yLo), formatTick(yHi)], toY))
  prims.push({
    kind: 'polyline',
    points: t.map((tv, i) => [toX(tv), toY(logv(envelope[i]))] as [number, number]),
    color: style.colors[1],
    dash: true,
  })
  prims.push({
    kind: 'polyline',
    points: t.map((tv, i) => [toX(tv), toY(logv(z[i]))] as [number, number]),
    color: style.colors[0],
  })
  t.forEach((tv, i) => {
    prims.push({
      kind: 'circle',
      cx: toX(tv),
      cy: toY(logv(z[i])),
      r: 2.5,
      fill: ok[i] ? style.colors[2] : style.colors[1],
    })
  })
  prims.push({ kind: 'text', x: frame.right - 8, y: frame.top + 16, text: '||Z(t)||^2', color: style.colors[0], anchor: 'end', size: 10 })
  prims.push({ kind: 'text', x: frame.right - 8, y: frame.top + 30, text: 'bound', color: style.colors[1], anchor: 'end', size: 10 })
  return { width: style.width, height: style.height, background: style.background, primitives: prims }
}

// -- region diagram ---------------------------------------------------------------

function regionScene(style: Style): Scene {
  const frame = frameOf(style)
  // coordinates (x, y) = (1/p, 1/q); criterion lines 3x + 2y = 2 and 3x + 2y = 1
  const toX = scaleLinear(0, 0.8, frame.left, frame.right)
  const toY = scaleLinear(0, 1.1, frame.bottom, frame.top)
  const prims = axes(frame, 'uniqueness criterion exponents', '1/p', '1/q')
  const outer: Array<[number, number]> = [
    [0, 1],
    [2 / 3, 0],
  ]
  const inner: Array<[number, number]> = [
    [0, 0.5],
    [1 / 3, 0],
  ]
  // shaded uniqueness band between the two scaling lines
  prims.push({
    kind: 'polygon',
    points: [outer[0], outer[1], inner[1], inner[0]].map(([x, y]) => [toX(x), toY(y)] as [number, number]),
    fill: '#2c6cf5',
    opacity: 0.18,
  })
  prims.push({
    kind: 'polyline',
    points: outer.map(([x, y]) => [toX(x), toY(y)] as [number, number]),
    color: style.colors[0],
    width: 2,
  })
  prims.push({
    kind: 'polyline',
    points: inner.map(([x, y]) => [toX(x), toY(y)] as [number, number]),
    color: style.colors[1],
    width: 2,
    dash: true,
  })
  prims.push({ kind: 'text', x: toX(0.45), y: toY(0.45), text: '2/q + 3/p = 2', color: style.colors[0], size: 11 })
  prims.push({ kind: 'text', x: toX(0.26), y: toY(0.14), text: '2/q + 3/p = 1', color: style.colors[1], size: 11 })
  prims.push({ kind: 'text', x: toX(0.16), y: toY(0.55), text: 'uniqueness', size: 11 })
  prims.push({ kind: 'text', x: toX(0.45), y: toY(0.75), text: 'I (open)', size: 11 })
  prims.push({ kind: 'text', x: toX(0.05), y: toY(0.1), text: 'II (regular)', size: 11 })
  const markers: Array<[string, number, number]> = [
    ['P1', 0, 1],
    ['P2', 2 / 3, 0],
    ['P3', 0, 0.5],
    ['P4', 1 / 3, 0],
  ]
  for (const [label, x, y] of markers) {
    prims.push({ kind: 'circle', cx: toX(x), cy: toY(y), r: 4, fill: '#111111' })
    prims.push({ kind: 'text', x: toX(x) + 8, y: toY(y) - 6, text: label, size: 11 })
  }
  return { width: style.width, height: style.height, background: style.background, primitives: prims }
}

// -- entry point --------------------------------------------------------------------

export function buildScene(job: PlotJob): RenderInfo {
  const style = loadStyle(job.stylePath)
  switch (job.kind) {
    case 'flux_spectrum':
      return { scene: fluxScene(job, style) }
    case 'budget_timeseries':
      return budgetScene(job, style)
    case 'uniqueness_envelope':
      return { scene: uniquenessScene(job, style) }
    case 'region_diagram':
      return { scene: regionScene(style) }
    default:
      throw new SchemaError(`unknown plot kind: ${String(job.kind)}`)
  }
}

export function render(job: PlotJob): RenderInfo {
  if (job.kind !== 'region_diagram' && job.inputs.length === 0) {
    throw new SchemaError(`${job.kind} needs at least one input CSV`)
  }
  const info = buildScene(job)
  if (job.output.endsWith('.svg')) {
    writeFileSync(job.output, sceneToSvg(info.scene))
  } else if (job.output.endsWith('.png')) {
    writeFileSync(job.output, sceneToPng(info.scene))
  } else {
    throw new SchemaError(`output must end in .svg or .png, got ${job.output}`)
  }
  return info
}
