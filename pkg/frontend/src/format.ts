/** Display formatting: percents to two decimals, basis points as integers,
 * CAD amounts to the cent. Every risk number formatted here originates in a
 * service response — nothing is computed locally except unit conversion. */

/** Round half away from zero (so -21.8 -> -22, 0.5 -> 1, -0.5 -> -1). */
export function roundHalfAway(x: number): number {
  const r = Math.sign(x) * Math.round(Math.abs(x));
  return r === 0 ? 0 : r;
}

/** 1089.47 bps -> "10.89%". */
export function percentFromBps(bps: number): string {
  return `${(bps / 100).toFixed(2)}%`;
}

/** Discrepancies carry an explicit sign: 2028.23 -> "+20.28%". */
export function signedPercentFromBps(bps: number): string {
  const text = percentFromBps(bps);
  return text.startsWith("-") ? text : `+${text}`;
}

/** 3117.70 bps -> "3118 bps". */
export function bpsInteger(bps: number): string {
  return `${roundHalfAway(bps)} bps`;
}

/** 35275.856 -> "$35,275.86"; negatives as "-$246.18". */
export function cad(amount: number): string {
  const sign = amount < 0 ? "-" : "";
  const fixed = Math.abs(amount).toFixed(2);
  const dot = fixed.indexOf(".");
  const whole = fixed.slice(0, dot).replace(/\B(?=(\d{3})+(?!\d))/g, ",");
  return `${sign}$${whole}${fixed.slice(dot)}`;
}

/** Dollar impact of a bps figure on a market value (pure unit conversion of
 * a service-provided number). */
export function deltaDollars(marketValue: number, bps: number): number {
  return (marketValue * bps) / 10_000;
}

/** Wire classification -> badge text. */
export function classificationLabel(classification: string): string {
  switch (classification) {
    case "under_risked":
      return "under-risked";
    case "over_risked":
      return "over-risked";
    case "aligned":
      return "aligned";
    default:
      return classification;
  }
}

/** Metric table cell: integers stay bare ("49280"), otherwise two decimals. */
export function metricValueText(value: number): string {
  const fixed = value.toFixed(2);
  return fixed.endsWith(".00") ? fixed.slice(0, -3) : fixed;
}
