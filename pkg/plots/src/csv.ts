import { readFileSync } from 'fs'

export interface Table {
  path: string
  columns: string[]
  rows: number[][]
}

export class SchemaError extends Error {}

/** Read a comma-delimited numeric CSV with a mandatory header row. */
export function readCsv(path: string): Table {
  const text = readFileSync(path, 'utf8').trim()
  if (text.length === 0) throw new SchemaError(`${path}: empty file`)
  const lines = text.split(/\r?\n/)
  const columns = lines[0].split(',').map((c) => c.trim())
  const rows: number[][] = []
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(',')
    if (parts.length !== columns.length) {
      throw new SchemaError(`${path}: row ${i} has ${parts.length} fields, header has ${columns.length}`)
    }
    rows.push(parts.map(parseCell))
  }
  return { path, columns, rows }
}

function parseCell(text: string): number {
  const t = text.trim().toLowerCase()
  if (t === 'true') return 1
  if (t === 'false') return 0
  const v = Number(t)
  if (Number.isNaN(v)) throw new SchemaError(`not a number: ${text}`)
  return v
}

/**
 * Pull named columns, enforcing the producing module's schema.  Unknown
 * extra columns are ignored with a warning; a missing column is an error
 * naming it.
 */
export function requireColumns(table: Table, required: string[]): Map<string, number[]> {
  for (const name of required) {
    if (!table.columns.includes(name)) {
      throw new SchemaError(`${table.path}: missing column '${name}' (have: ${table.columns.join(',')})`)
    }
  }
  for (const name of table.columns) {
    if (!required.includes(name)) {
      process.stderr.write(`warning: ${table.path}: ignoring unknown column '${name}'\n`)
    }
  }
  const out = new Map<string, number[]>()
  for (const name of required) {
    const idx = table.columns.indexOf(name)
    out.set(name, table.rows.map((r) => r[idx]))
  }
  return out
}
