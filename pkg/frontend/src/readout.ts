/**
 * Pure view-state for the side panel: predicted coefficients, losses,
 * sparsity count and the implied (mu, lambda) pair. Keeping this free of DOM
 * access lets the interaction contract be tested headlessly.
 */

import { HyperparamsView, nearZeroCount, weightToHyperparams } from "./convert";
import { ClientModel, Manifest, evaluateModel } from "./model";

export interface ReadoutState {
  w: number[];
  theta: number[];
  losses: number[];
  hyper: HyperparamsView;
  nearZero: number;
  threshold: number;
}

export function buildReadout(
  model: ClientModel,
  manifest: Manifest,
  w: number[],
  threshold: number,
): ReadoutState {
  const value = evaluateModel(model, w);
  const theta = value.slice(0, manifest.n);
  const losses = value.slice(manifest.n);
  return {
    w,
    theta,
    losses,
    hyper: weightToHyperparams(w, manifest.epsilon),
    nearZero: nearZeroCount(theta, threshold),
    threshold,
  };
}

export function formatHyper(state: ReadoutState): string {
  if (!state.hyper.defined) {
    return "(μ, λ) undefined on this face";
  }
  return `μ = ${state.hyper.mu.toPrecision(6)}, λ = ${state.hyper.lambda.toPrecision(6)}`;
}
