/** Weight-space helpers shared by the readout and the ternary picker. */

export interface HyperparamsView {
  defined: boolean;
  mu: number;
  lambda: number;
}

/**
 * The regularization pair implied by a weight: mu = w2/w1, lambda = (w3+eps)/w1.
 * Undefined as w1 -> 0, where no finite elastic net problem corresponds.
 */
export function weightToHyperparams(w: number[], epsilon: number): HyperparamsView {
  if (w[0] <= 0) {
    return { defined: false, mu: NaN, lambda: NaN };
  }
  return { defined: true, mu: w[1] / w[0], lambda: (w[2] + epsilon) / w[0] };
}

/**
 * Clamp negatives to zero and renormalize so the result lies on the simplex.
 * Used after the exact affine inversion of a pointer position, which can land
 * slightly outside the triangle.
 */
export function clampToSimplex(w: number[]): number[] {
  const clipped = w.map((v) => (v > 0 ? v : 0));
  const total = clipped.reduce((a, b) => a + b, 0);
  if (total <= 0) {
    // degenerate pointer far outside: snap to the centroid
    return clipped.map(() => 1 / clipped.length);
  }
  return clipped.map((v) => v / total);
}

/** Count coordinates with |value| at or below the sparsity threshold. */
export function nearZeroCount(theta: number[], threshold: number): number {
  return theta.reduce((acc, v) => acc + (Math.abs(v) <= threshold ? 1 : 0), 0);
}
