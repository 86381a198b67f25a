/** Display formatting. Values arrive from the service; formatting attaches
 * units and groups digits but never re-derives or re-rounds the underlying
 * quantity beyond what is shown. FLOP strings are echoed verbatim. */

export function flops(decimalString: string): string {
  return `${decimalString} FLOP`;
}

export function cost(usd: number | null): string {
  if (usd === null) return "unpriced";
  if (usd >= 1e9) return `$${(usd / 1e9).toFixed(2)}B`;
  if (usd >= 1e6) return `$${(usd / 1e6).toFixed(1)}M`;
  return `$${Math.round(usd).toLocaleString("en-US")}`;
}

export function params(count: number): string {
  return `${(count / 1e9).toFixed(1)}B params`;
}

export function mbps(bps: number): string {
  return `${(bps / 1e6).toFixed(1)} Mbps`;
}

export function ratio(value: number, digits = 4): string {
  return value.toFixed(digits);
}

export function times(value: number): string {
  return `${value.toFixed(1)}x`;
}

export function seconds(value: number): string {
  return `${value.toFixed(1)} s`;
}

export function tokens(decimalString: string): string {
  return `${decimalString} tokens`;
}

/** Relative delta between two scalar metrics, for the comparison panel. */
export function delta(a: number, b: number): string {
  if (a === b) return "±0%";
  if (b === 0) return "n/a";
  const rel = (a / b - 1) * 100;
  return `${rel >= 0 ? "+" : ""}${rel.toFixed(1)}%`;
}
