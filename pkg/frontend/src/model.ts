/**
 * Client-side Bezier simplex model: parsing, validation and evaluation.
 *
 * The model JSON lists control points in reverse-lexicographic multi-index
 * order; evaluation reproduces the producer's formula bit-for-bit apart from
 * rounding: b(w) = sum_i C(d, i) * w^i * p_i with the 0^0 = 1 convention, so
 * vertices map exactly onto corner control points.
 */

export interface ClientModel {
  m: number;
  d: number;
  outDim: number;
  controlPoints: number[][];
  /** Multi-index exponents, row-aligned with controlPoints. */
  exponents: number[][];
  /** Multinomial coefficients C(d, i) per row. */
  coefficients: number[];
}

export interface Manifest {
  dataset: string;
  epsilon: number;
  n: number;
  out_dim: number;
  loss_labels: string[];
  resolution?: number | null;
}

/** All m-tuples of non-negative integers summing to d, reverse-lexicographic. */
export function enumerateExponents(m: number, d: number): number[][] {
  if (m === 1) return [[d]];
  const out: number[][] = [];
  for (let head = d; head >= 0; head--) {
    for (const tail of enumerateExponents(m - 1, d - head)) {
      out.push([head, ...tail]);
    }
  }
  return out;
}

function binomial(n: number, k: number): number {
  let value = 1;
  for (let j = 1; j <= k; j++) {
    value = (value * (n - k + j)) / j;
  }
  return Math.round(value);
}

/** d! / (i_1! ... i_m!) as a product of binomials; exact for the degrees used here. */
export function multinomialCoefficient(d: number, exps: number[]): number {
  let running = 0;
  let coeff = 1;
  for (const e of exps) {
    running += e;
    coeff *= binomial(running, e);
  }
  return coeff;
}

export function basisCount(m: number, d: number): number {
  return binomial(d + m - 1, m - 1);
}

/** Parse and validate a model JSON object; throws on malformed input. */
export function parseModel(raw: unknown): ClientModel {
  if (typeof raw !== "object" || raw === null) {
    throw new Error("model JSON must be an object");
  }
  const obj = raw as Record<string, unknown>;
  const m = Number(obj.m);
  const d = Number(obj.d);
  if (!Number.isInteger(m) || m < 1 || !Number.isInteger(d) || d < 0) {
    throw new Error(`invalid model dimensions m=${obj.m}, d=${obj.d}`);
  }
  if (obj.index_order !== "revlex") {
    throw new Error(`unsupported index order ${String(obj.index_order)}`);
  }
  const points = obj.control_points;
  if (!Array.isArray(points) || points.length !== basisCount(m, d)) {
    throw new Error(
      `expected ${basisCount(m, d)} control points for m=${m}, d=${d}, got ${
        Array.isArray(points) ? points.length : "none"
      }`,
    );
  }
  const outDim = Array.isArray(points[0]) ? (points[0] as number[]).length : -1;
  if (outDim < 1) throw new Error("control points must be non-empty vectors");
  const controlPoints = points.map((row, index) => {
    if (!Array.isArray(row) || row.length !== outDim) {
      throw new Error(`control point ${index} has inconsistent length`);
    }
    const values = row.map(Number);
    if (values.some((v) => !Number.isFinite(v))) {
      throw new Error(`control point ${index} has non-finite entries`);
    }
    return values;
  });
  const exponents = enumerateExponents(m, d);
  const coefficients = exponents.map((e) => multinomialCoefficient(d, e));
  return { m, d, outDim, controlPoints, exponents, coefficients };
}

/** Basis values for one barycentric point, canonical index order. */
export function basisValues(model: ClientModel, w: number[]): number[] {
  if (w.length !== model.m) {
    throw new Error(`weight has ${w.length} components, model expects ${model.m}`);
  }
  // power tables keep vertex evaluation exact: w^0 = 1 even at w = 0
  const powers: number[][] = [];
  for (let k = 0; k < model.m; k++) {
    const table = new Array<number>(model.d + 1);
    table[0] = 1;
    for (let e = 1; e <= model.d; e++) table[e] = table[e - 1] * w[k];
    powers.push(table);
  }
  return model.exponents.map((exps, row) => {
    let value = model.coefficients[row];
    for (let k = 0; k < model.m; k++) value *= powers[k][exps[k]];
    return value;
  });
}

/** Full model evaluation b(w). */
export function evaluateModel(model: ClientModel, w: number[]): number[] {
  const basis = basisValues(model, w);
  const out = new Array<number>(model.outDim).fill(0);
  for (let row = 0; row < basis.length; row++) {
    const b = basis[row];
    if (b === 0) continue;
    const p = model.controlPoints[row];
    for (let c = 0; c < model.outDim; c++) out[c] += b * p[c];
  }
  return out;
}

/** Single output coordinate of b(w); used by the heatmap inner loop. */
export function evaluateCoordinate(model: ClientModel, w: number[], column: number): number {
  const basis = basisValues(model, w);
  let value = 0;
  for (let row = 0; row < basis.length; row++) {
    value += basis[row] * model.controlPoints[row][column];
  }
  return value;
}
