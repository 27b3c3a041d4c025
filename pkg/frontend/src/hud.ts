// Trial HUD DOM panel: live timer, attempt count, outcome splash, and
// the post-trial summary.

import { ViewModel } from "./viewmodel.js";

const OUTCOME_LABEL: Record<string, string> = {
  success: "SUCCESS",
  fail_wrong_location: "FAILED: wrong location",
  fail_hazard_contact: "FAILED: hazard contact",
};

export function renderHud(vm: ViewModel, el: HTMLElement): void {
  const hud = vm.hud;
  const parts: string[] = [];
  parts.push(`<span class="timer">t ${hud.elapsed.toFixed(2)} s</span>`);
  parts.push(`<span class="attempts">attempts ${hud.attempts}</span>`);
  const summary = hud.summary();
  if (summary !== null) {
    const cls = summary.outcome === "success" ? "splash ok" : "splash bad";
    parts.push(
      `<span class="${cls}">${OUTCOME_LABEL[summary.outcome] ?? summary.outcome}` +
        ` in ${summary.completionTime.toFixed(2)} s, ${summary.attempts} attempt(s)</span>`,
    );
  }
  if (vm.lastError !== null) {
    parts.push(`<span class="error">${vm.lastError}</span>`);
  }
  parts.push(`<span class="conn">${vm.connection}</span>`);
  el.innerHTML = parts.join(" ");
}
