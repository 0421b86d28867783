/** Least-squares slope/intercept of y against x. */
export function linearFit(x: number[], y: number[]): { slope: number; intercept: number } {
  const n = x.length
  if (n < 2) throw new Error('need at least two points to fit')
  let sx = 0
  let sy = 0
  let sxx = 0
  let sxy = 0
  for (let i = 0; i < n; i++) {
    sx += x[i]
    sy += y[i]
    sxx += x[i] * x[i]
    sxy += x[i] * y[i]
  }
  const denom = n * sxx - sx * sx
  if (denom === 0) throw new Error('degenerate abscissae')
  const slope = (n * sxy - sx * sy) / denom
  return { slope, intercept: (sy - slope * sx) / n }
}

/**
 * Exponential decay rate of y(t) ~ y0 exp(-rate t), from a log-linear fit
 * over samples with |y| > 0; the sign of y may be uniformly negative.
 */
export function decayRate(t: number[], y: number[]): number {
  const ts: number[] = []
  const logs: number[] = []
  for (let i = 0; i < t.length; i++) {
    const mag = Math.abs(y[i])
    if (mag > 0) {
      ts.push(t[i])
      logs.push(Math.log(mag))
    }
  }
  return -linearFit(ts, logs).slope
}
