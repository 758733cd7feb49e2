// Display formatting for payload numbers. Rounding operates on the
// shortest decimal representation (what String() produces) with ties away
// from zero, which reproduces the server's table renderer byte for byte.

export function halfUpFixed(x: number, places: number): string {
  if (!Number.isFinite(x)) return String(x);
  const neg = x < 0;
  const s = String(Math.abs(x));
  const e = s.indexOf("e");
  const mant = e < 0 ? s : s.slice(0, e);
  const exp = e < 0 ? 0 : Number(s.slice(e + 1));
  const dot = mant.indexOf(".");
  let digits = dot < 0 ? mant : mant.slice(0, dot) + mant.slice(dot + 1);
  let intLen = (dot < 0 ? mant.length : dot) + exp;
  if (intLen <= 0) {
    digits = "0".repeat(1 - intLen) + digits;
    intLen = 1;
  }
  if (digits.length < intLen) digits = digits.padEnd(intLen, "0");
  let whole = digits.slice(0, intLen);
  let frac = digits.slice(intLen);
  if (frac.length <= places) {
    frac = frac.padEnd(places, "0");
  } else {
    const roundUp = frac.charCodeAt(places) >= 53;
    frac = frac.slice(0, places);
    if (roundUp) {
      const all = (whole + frac).split("");
      let carry = 1;
      for (let i = all.length - 1; i >= 0 && carry; i--) {
        const d = all[i]!.charCodeAt(0) - 48 + carry;
        all[i] = String.fromCharCode(48 + (d % 10));
        carry = d >= 10 ? 1 : 0;
      }
      if (carry) all.unshift("1");
      whole = all.slice(0, all.length - places).join("");
      frac = all.slice(all.length - places).join("");
    }
  }
  const sign = neg ? "-" : "";
  return places > 0 ? `${sign}${whole}.${frac}` : `${sign}${whole}`;
}

/** Three-decimal rendering used for thresholds, rates, and probabilities. */
export function fmt3(x: number | null): string {
  return x === null ? "n/a" : halfUpFixed(x, 3);
}

/** Whole-percent rendering used for confidence levels. */
export function fmtPct(x: number | null): string {
  return x === null ? "n/a" : halfUpFixed(x, 0) + "%";
}

/** Signed three-decimal rendering for comparison deltas. */
export function fmtDelta(x: number): string {
  const body = halfUpFixed(Math.abs(x), 3);
  if (x > 0) return "+" + body;
  if (x < 0) return "-" + body;
  return body;
}

/** Compact rendering for probe HR column headers, e.g. "0.7" or "1.5". */
export function fmtHr(x: number): string {
  return String(x);
}
