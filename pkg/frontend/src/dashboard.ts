// Progress dashboard: human-effort gauge, identified count, per-batch
// inclusion-rate sparkline, rank-similarity history, and the service's stop
// advice with the thresholds behind it. Pure rendering over the polled
// session snapshot; no number is computed client-side that the service
// already reports.

import type { SessionSnapshot } from "./session";
import type { BatchStats } from "./types";

function sparkline(batches: BatchStats[], width = 220, height = 48): string {
  const rates = batches
    .filter((b) => b.labeled > 0 && b.inclusion_rate !== null)
    .map((b) => b.inclusion_rate as number);
  if (!rates.length) {
    return `<svg width="${width}" height="${height}" data-testid="sparkline"></svg>`;
  }
  const max = Math.max(...rates, 0.0001);
  const step = width / rates.length;
  const bars = rates
    .map((rate, i) => {
      const barHeight = Math.max(1, (rate / max) * (height - 4));
      return `<rect x="${(i * step).toFixed(1)}" y="${(height - barHeight).toFixed(1)}"
        width="${Math.max(1, step - 2).toFixed(1)}" height="${barHeight.toFixed(1)}"></rect>`;
    })
    .join("");
  return `<svg width="${width}" height="${height}" data-testid="sparkline">${bars}</svg>`;
}

export function formatPercent(value: number): string {
  return `${(value * 100).toFixed(2)}%`;
}

export class Dashboard {
  constructor(private root: HTMLElement) {}

  render(snapshot: SessionSnapshot): void {
    const { view, metrics, advice, offline } = snapshot;
    if (!view || !metrics) {
      this.root.innerHTML = `<div class="panel">waiting for service…</div>`;
      return;
    }
    const he = metrics.human_effort;
    const rhoRows = metrics.rank_similarity_history.length
      ? metrics.rank_similarity_history
          .map(
            (r) => `<li>iteration ${r.iteration}:
              <span data-testid="rho-${r.iteration}">${r.rank_similarity === null ? "n/a" : r.rank_similarity.toFixed(4)}</span></li>`,
          )
          .join("")
      : `<li class="empty" data-testid="rho-empty">no completed iteration yet</li>`;
    const f1Rows = metrics.f1_history
      .map(
        (r) => `<li>v${r.model_version}:
          <span data-testid="f1-${r.model_version}">${r.val_f1 === null ? "n/a" : r.val_f1.toFixed(4)}</span></li>`,
      )
      .join("");
    const stopTraining = advice?.stop_training;
    const stopScreening = advice?.stop_screening;
    const banners = [
      offline
        ? `<div class="banner offline">offline: showing last known numbers</div>`
        : "",
      stopTraining?.advised
        ? `<div class="banner advice" data-testid="stop-training-banner">
             rankings have settled (rho ${stopTraining.rank_similarity?.toFixed(4) ?? "n/a"}
             vs threshold ${stopTraining.threshold ?? "off"}): consider moving to prioritized screening</div>`
        : "",
      stopScreening?.advised
        ? `<div class="banner advice" data-testid="stop-screening-banner">
             consider stopping: last batch yielded ${stopScreening.batch_included}
             included (rate ${stopScreening.batch_inclusion_rate?.toFixed(4)} &lt; ${stopScreening.min_rate})</div>`
        : "",
    ].join("");

    this.root.innerHTML = `
      ${banners}
      <div class="panel stats">
        <div class="gauge">
          <div class="gauge-fill" style="width:${Math.round(he * 100)}%"></div>
          <span>human effort <b data-testid="human-effort">${formatPercent(he)}</b>
            (<span data-testid="screened">${metrics.screened}</span> of
             <span data-testid="corpus-n">${metrics.n}</span>)</span>
        </div>
        <div>identified so far: <b data-testid="identified">${metrics.identified}</b>
          <small>(true inclusion rate unknown: total relevant count unobservable)</small></div>
        <div>phase <b data-testid="phase">${view.phase}</b>,
             model <b data-testid="model-version">v${view.model_version}</b></div>
      </div>
      <div class="panel">
        <h3>per-batch inclusion rate</h3>
        ${sparkline(metrics.batches)}
      </div>
      <div class="panel">
        <h3>ranking similarity</h3>
        <ul data-testid="rho-list">${rhoRows}</ul>
        <h3>validation F1</h3>
        <ul data-testid="f1-list">${f1Rows}</ul>
      </div>`;
  }
}
