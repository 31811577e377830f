/** Axis scales: data domain -> pixel range, plus tick placement. */

export interface Scale {
  map(x: number): number;
  ticks: number[];
  domain: [number, number];
}

/** Largest "nice" step (1/2/5 times a power of ten) giving at most n ticks. */
function niceStep(span: number, n: number): number {
  const rough = span / n;
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  for (const m of [1, 2, 5, 10]) {
    if (m * power >= rough) {
      return m * power;
    }
  }
  return 10 * power;
}

export function linearScale(domain: [number, number], range: [number, number], n = 5): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (!(d1 > d0)) {
    throw new Error(`degenerate linear domain [${d0}, ${d1}]`);
  }
  const step = niceStep(d1 - d0, n);
  const ticks: number[] = [];
  const first = Math.ceil(d0 / step - 1e-9);
  const last = Math.floor(d1 / step + 1e-9);
  for (let k = first; k <= last; k += 1) {
    ticks.push(k === 0 ? 0 : parseFloat((k * step).toPrecision(12)));
  }
  return {
    map: (x) => r0 + ((x - d0) / (d1 - d0)) * (r1 - r0),
    ticks,
    domain: [d0, d1],
  };
}

/** Log scale over a strictly positive domain; ticks at powers of ten. */
export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (!(d0 > 0 && d1 > d0)) {
    throw new Error(`log domain must be positive and increasing, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const ticks: number[] = [];
  for (let e = Math.ceil(l0 - 1e-9); e <= l1 + 1e-9; e += 1) {
    ticks.push(Math.pow(10, e));
  }
  return {
    map: (x) => r0 + ((Math.log10(x) - l0) / (l1 - l0)) * (r1 - r0),
    ticks,
    domain: [d0, d1],
  };
}

/** Pad a data extent so points do not sit on the frame. */
export function padded(lo: number, hi: number, frac = 0.05): [number, number] {
  if (hi === lo) {
    const eps = lo === 0 ? 1 : Math.abs(lo) * 0.5;
    return [lo - eps, hi + eps];
  }
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

/** Tick label: plain decimal when short, otherwise exponent notation. */
export function tickLabel(value: number): string {
  if (value === 0) {
    return "0";
  }
  const abs = Math.abs(value);
  if (abs >= 1e-3 && abs < 1e4) {
    return String(parseFloat(value.toPrecision(6)));
  }
  const e = Math.floor(Math.log10(abs));
  const mantissa = parseFloat((value / Math.pow(10, e)).toPrecision(3));
  return mantissa === 1 ? `1e${e}` : `${mantissa}e${e}`;
}
