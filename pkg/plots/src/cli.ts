#!/usr/bin/env node
import { render, PlotKind } from './render.js'
import { SchemaError } from './csv.js'

const KINDS: PlotKind[] = ['flux_spectrum', 'budget_timeseries', 'uniqueness_envelope', 'region_diagram']

function usage(): string {
  return (
    'usage: emhd-plot <kind> --in FILE[,FILE...] --out FILE [--style FILE]\n' +
    `  kinds: ${KINDS.join(', ')}\n` +
    '  (region_diagram takes no --in)\n'
  )
}

export function main(argv: string[]): number {
  const [kind, ...rest] = argv
  if (!kind || kind === '--help' || kind === '-h') {
    process.stderr.write(usage())
    return kind ? 0 : 1
  }
  if (!KINDS.includes(kind as PlotKind)) {
    process.stderr.write(`unknown kind '${kind}'\n${usage()}`)
    return 1
  }
  let inputs: string[] = []
  let output = ''
  let stylePath: string | undefined
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i]
    const value = rest[i + 1]
    if (value === undefined) {
      process.stderr.write(`flag ${flag} needs a value\n`)
      return 1
    }
    if (flag === '--in') inputs = value.split(',').filter((s) => s.length > 0)
    else if (flag === '--out') output = value
    else if (flag === '--style') stylePath = value
    else {
      process.stderr.write(`unknown flag '${flag}'\n${usage()}`)
      return 1
    }
  }
  if (!output) {
    process.stderr.write(`--out is required\n${usage()}`)
    return 1
  }
  try {
    render({ kind: kind as PlotKind, inputs, output, stylePath })
  } catch (err) {
    if (err instanceof SchemaError || err instanceof Error) {
      process.stderr.write(`error: ${err.message}\n`)
      return 1
    }
    throw err
  }
  return 0
}

const invokedDirectly = process.argv[1]?.endsWith('cli.js') || process.argv[1]?.endsWith('cli.ts')
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)))
}
