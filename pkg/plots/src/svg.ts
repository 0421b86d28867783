import type { Primitive, Scene } from './scene.js'

const f = (v: number) => (Math.round(v * 100) / 100).toString()

function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;')
}

function emit(p: Primitive): string {
  switch (p.kind) {
    case 'line': {
      const dash = p.dash ? ' stroke-dasharray="6 4"' : ''
      return `<line x1="${f(p.x1)}" y1="${f(p.y1)}" x2="${f(p.x2)}" y2="${f(p.y2)}" stroke="${p.color}" stroke-width="${p.width ?? 1.5}"${dash}/>`
    }
    case 'polyline': {
      const pts = p.points.map(([x, y]) => `${f(x)},${f(y)}`).join(' ')
      const dash = p.dash ? ' stroke-dasharray="6 4"' : ''
      return `<polyline points="${pts}" fill="none" stroke="${p.color}" stroke-width="${p.width ?? 1.5}"${dash}/>`
    }
    case 'rect':
      return `<rect x="${f(p.x)}" y="${f(p.y)}" width="${f(p.w)}" height="${f(p.h)}" fill="${p.fill}" fill-opacity="${p.opacity ?? 1}"/>`
    case 'polygon': {
      const pts = p.points.map(([x, y]) => `${f(x)},${f(y)}`).join(' ')
      return `<polygon points="${pts}" fill="${p.fill}" fill-opacity="${p.opacity ?? 1}"/>`
    }
    case 'circle':
      return `<circle cx="${f(p.cx)}" cy="${f(p.cy)}" r="${f(p.r)}" fill="${p.fill}"/>`
    case 'text': {
      const anchor = p.anchor ?? 'start'
      const size = p.size ?? 12
      return `<text x="${f(p.x)}" y="${f(p.y)}" font-family="monospace" font-size="${size}" fill="${p.color ?? '#000000'}" text-anchor="${anchor}">${esc(p.text)}</text>`
    }
  }
}

/** Deterministic SVG serialization (no timestamps, fixed precision). */
export function sceneToSvg(scene: Scene): string {
  const body = scene.primitives.map(emit).join('\n  ')
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">\n` +
    `  <rect x="0" y="0" width="${scene.width}" height="${scene.height}" fill="${scene.background}"/>\n` +
    `  ${body}\n</svg>\n`
  )
}
