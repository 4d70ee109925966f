/** Missing readings arrive from the API already spelled out; keep the token. */
export const MISSING_TOKEN = "no reading";

/** Probability leads in every header; margin is shown alongside for auditing. */
export function formatProbability(p: number): string {
  return `${(p * 100).toFixed(1)}%`;
}

export function formatMargin(margin: number): string {
  return margin.toFixed(3);
}

export function formatContribution(value: number): string {
  const text = value.toFixed(4);
  return value > 0 ? `+${text}` : text;
}

export function formatDistance(value: number): string {
  return value.toFixed(3);
}

export function formatScore(value: number): string {
  return value.toFixed(4);
}

/** Scatter axis values; null means the reading was missing. */
export function formatPointValue(value: number | null): string {
  return value === null ? MISSING_TOKEN : value.toPrecision(5);
}

export function formatRowTime(rowId: number): string {
  return new Date(rowId * 1000).toISOString().replace(".000Z", "Z");
}

export function formatLabel(label: number | null): string {
  if (label === null) {
    return "unlabeled";
  }
  return label === 1 ? "failure window" : "healthy";
}
