/**
 * Exact fraction handling for values transported as decimal strings.
 *
 * Counts and significance ratios may exceed 53 bits, so everything here goes
 * through BigInt; nothing is ever converted to a float.  Rounding to a percent
 * happens only for display.
 */

export interface Fraction {
  num: string;
  den: string;
}

/** Sign of a - b, by cross-multiplication. */
export function compareFractions(a: Fraction, b: Fraction): number {
  const left = BigInt(a.num) * BigInt(b.den);
  const right = BigInt(b.num) * BigInt(a.den);
  if (left < right) return -1;
  if (left > right) return 1;
  return 0;
}

/** Round-half-up percentage, computed in integer arithmetic. */
export function percentOf(f: Fraction): number {
  const num = BigInt(f.num);
  const den = BigInt(f.den);
  return Number((200n * num + den) / (2n * den));
}

function gcd(a: bigint, b: bigint): bigint {
  while (b !== 0n) {
    [a, b] = [b, a % b];
  }
  return a;
}

/** Lowest-terms form of the same rational; a display concern only. */
export function reduceFraction(f: Fraction): Fraction {
  const num = BigInt(f.num);
  const den = BigInt(f.den);
  if (num === 0n) return { num: "0", den: "1" };
  const divisor = gcd(num, den);
  return { num: (num / divisor).toString(), den: (den / divisor).toString() };
}

export function formatFraction(f: Fraction): string {
  const reduced = reduceFraction(f);
  return `${reduced.num}/${reduced.den}`;
}
