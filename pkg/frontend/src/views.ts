/** HTML renderers for the three panels: prompt queue, preference
 * editor, consent log. Pure string producers so they test without a
 * DOM; app.ts owns event wiring and form readback.
 */

import {
  KNOWN_ACTIONS,
  RETENTION_RUNGS,
  formatTimestamp,
  labelFor,
  localName,
  shortDigest,
} from "./format.js";
import type {
  ChainReport,
  LogRecord,
  PendingItem,
  PendingQuestion,
  PreferenceRule,
  Profile,
  Taxonomy,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function attr(text: string): string {
  return escapeHtml(text);
}

function decisionOptions(selected: string): string {
  return ["allow", "deny", "ask"]
    .map((d) => `<option value="${d}"${d === selected ? " selected" : ""}>${d}</option>`)
    .join("");
}

// -- prompt queue ------------------------------------------------------------

function purposeHtml(question: PendingQuestion, taxonomy: Taxonomy | null): string {
  const label = labelFor(question.purpose, taxonomy);
  if (!label.known) {
    // unknown purpose: show the IRI verbatim and flag it, never guess
    return `<code class="iri">${escapeHtml(question.purpose)}</code>
      <span class="badge warn">not in taxonomy</span>`;
  }
  const definition = label.definition
    ? `<p class="definition">${escapeHtml(label.definition)}</p>`
    : "";
  return `<span class="purpose-label" title="${attr(question.purpose)}">${escapeHtml(label.text)}</span>${definition}`;
}

function requestedHtml(question: PendingQuestion): string {
  const actions = question.requestedActions
    .map((iri) => `<code title="${attr(iri)}">${escapeHtml(localName(iri))}</code>`)
    .join(", ");
  const parts: string[] = [];
  if (actions) parts.push(`wants to ${actions}`);
  if (question.requestedRetention !== null) {
    parts.push(`keep for <code>${escapeHtml(question.requestedRetention)}</code>`);
  }
  if (parts.length === 0) return "";
  return `
    <p class="requested">${parts.join(", ")}</p>`;
}

function questionHtml(item: PendingItem, question: PendingQuestion, taxonomy: Taxonomy | null): string {
  const radio = `choice-${attr(item.id)}-${question.permissionIndex}`;
  // narrowing picks a subset of what was asked; fall back to the whole
  // action vocabulary when the request named none
  const offered =
    question.requestedActions.length > 0
      ? question.requestedActions.map((iri) => ({ iri, label: localName(iri) }))
      : KNOWN_ACTIONS;
  const actions = offered.map(
    (a) => `<label class="action"><input type="checkbox" class="narrow-action"
        value="${attr(a.iri)}"> ${escapeHtml(a.label)}</label>`,
  ).join("\n      ");
  const rungs = RETENTION_RUNGS.map(
    (r) => `<option value="${r.seconds}">${r.label}</option>`,
  ).join("");
  return `<li class="question" data-permission-index="${question.permissionIndex}">
    <div class="purpose">${purposeHtml(question, taxonomy)}</div>${requestedHtml(question)}
    <p class="reason">${escapeHtml(question.reason)}</p>
    <div class="controls">
      <label><input type="radio" name="${radio}" value="allow"> allow</label>
      <label><input type="radio" name="${radio}" value="deny" checked> deny</label>
      <details class="narrow">
        <summary>narrow the grant</summary>
        <fieldset class="narrow-actions">
          <legend>only these operations</legend>
          ${actions}
        </fieldset>
        <label class="retention">keep for
          <select class="narrow-retention">
            <option value="">as requested</option>${rungs}
          </select>
        </label>
      </details>
    </div>
  </li>`;
}

export function renderPromptCard(item: PendingItem, taxonomy: Taxonomy | null): string {
  const cookies = item.cookieNames
    .map((name) => `<code>${escapeHtml(name)}</code>`)
    .join(", ");
  const questions = item.questions
    .map((q) => questionHtml(item, q, taxonomy))
    .join("\n");
  return `<article class="card prompt" data-id="${attr(item.id)}">
  <header>
    <strong class="origin">${escapeHtml(item.origin)}</strong>
    <time datetime="${attr(item.createdAt)}">${escapeHtml(formatTimestamp(item.createdAt))}</time>
  </header>
  <p class="cookies">Cookies held back: ${cookies}</p>
  <ul class="questions">
${questions}
  </ul>
  <footer>
    <span class="digest" title="request digest">${shortDigest(item.requestDigest)}</span>
    <button type="button" class="resolve" data-id="${attr(item.id)}">Apply</button>
  </footer>
</article>`;
}

export function renderPromptQueue(items: PendingItem[], taxonomy: Taxonomy | null): string {
  if (items.length === 0) {
    return `<p class="empty">No pending decisions.</p>`;
  }
  return items.map((item) => renderPromptCard(item, taxonomy)).join("\n");
}

// -- preference editor -------------------------------------------------------

/** Depth-first walk of the taxonomy so the picker shows the subclass
 * structure: children indent under their parents. A node reachable by
 * two parents appears once, under the first. */
function purposeOptions(taxonomy: Taxonomy | null, selected: string): string {
  if (!taxonomy) {
    return `<option value="${attr(selected)}" selected>${escapeHtml(selected)}</option>`;
  }
  const out: string[] = [];
  const visited = new Set<string>();
  const walk = (iri: string, depth: number): void => {
    const node = taxonomy.nodes[iri];
    if (!node || visited.has(iri)) return;
    visited.add(iri);
    const indent = "  ".repeat(depth);
    const picked = iri === selected ? " selected" : "";
    out.push(
      `<option value="${attr(iri)}"${picked}>${indent}${escapeHtml(labelFor(iri, taxonomy).text)}</option>`,
    );
    for (const child of node.children) walk(child, depth + 1);
  };
  for (const root of taxonomy.roots) walk(root, 0);
  for (const iri of Object.keys(taxonomy.nodes)) walk(iri, 0);
  if (!visited.has(selected)) {
    out.push(`<option value="${attr(selected)}" selected>${escapeHtml(selected)}</option>`);
  }
  return out.join("");
}

function actionOptions(rule: PreferenceRule): string {
  const chosen = new Set(rule.actions ?? []);
  const known = new Set(KNOWN_ACTIONS.map((a) => a.iri));
  const extra = [...chosen].filter((iri) => !known.has(iri)).sort();
  const rows = [
    ...KNOWN_ACTIONS,
    ...extra.map((iri) => ({ iri, label: localName(iri) })),
  ];
  return rows
    .map(
      (a) =>
        `<option value="${attr(a.iri)}"${chosen.has(a.iri) ? " selected" : ""}>${escapeHtml(a.label)}</option>`,
    )
    .join("");
}

function retentionPicker(selected: number | null): string {
  const onRung = selected !== null && RETENTION_RUNGS.some((r) => r.seconds === selected);
  const custom = selected !== null && !onRung;
  const options = RETENTION_RUNGS.map(
    (r) =>
      `<option value="${r.seconds}"${r.seconds === selected ? " selected" : ""}>${r.label}</option>`,
  ).join("");
  return `<select class="rule-retention">
      <option value=""${selected === null ? " selected" : ""}>no limit</option>${options}
      <option value="custom"${custom ? " selected" : ""}>custom (seconds)</option>
    </select>
    <input type="number" class="rule-retention-custom" min="0" step="1"
      value="${custom ? selected : ""}"${custom ? "" : " hidden"}>`;
}

function decisionRadios(index: number, selected: string): string {
  return ["allow", "deny", "ask"]
    .map(
      (d) =>
        `<label><input type="radio" name="decision-${index}" class="rule-decision"
        value="${d}"${d === selected ? " checked" : ""}> ${d}</label>`,
    )
    .join("\n    ");
}

export function renderRuleRow(rule: PreferenceRule, index: number, taxonomy: Taxonomy | null): string {
  return `<tr class="rule" data-index="${index}">
  <td><select class="rule-purpose">${purposeOptions(taxonomy, rule.purpose)}</select></td>
  <td><select multiple size="4" class="rule-actions"
       title="no selection means any action">${actionOptions(rule)}</select></td>
  <td>${retentionPicker(rule.maxRetentionSeconds)}</td>
  <td>${decisionRadios(index, rule.decision)}</td>
  <td><button type="button" class="rule-remove" data-index="${index}">remove</button></td>
</tr>`;
}

export function renderPreferencesForm(profile: Profile, taxonomy: Taxonomy | null): string {
  const rows = profile.rules
    .map((rule, i) => renderRuleRow(rule, i, taxonomy))
    .join("\n");
  return `<form class="prefs" data-view="preferences">
  <label class="owner">Owner IRI
    <input name="owner" value="${attr(profile.owner)}">
  </label>
  <label class="default">When no rule matches
    <select name="defaultDecision">${decisionOptions(profile.defaultDecision)}</select>
  </label>
  <table class="rules">
    <thead>
      <tr><th>Purpose</th><th>Actions</th><th>Keep at most</th><th>Decision</th><th></th></tr>
    </thead>
    <tbody>
${rows}
    </tbody>
  </table>
  <button type="button" class="rule-add">Add rule</button>
  <button type="submit" class="save">Save preferences</button>
  <p class="form-error" hidden></p>
</form>`;
}

// -- consent log -------------------------------------------------------------

function agreementCell(record: LogRecord): string {
  if (!record.agreementDigest || !record.agreementTurtle) {
    return "none";
  }
  return `<details class="agreement">
    <summary><span class="digest">${shortDigest(record.agreementDigest)}</span></summary>
    <pre>${escapeHtml(record.agreementTurtle)}</pre>
  </details>`;
}

export function renderLogTable(records: LogRecord[]): string {
  if (records.length === 0) {
    return `<p class="empty">No consent decisions recorded yet.</p>`;
  }
  const rows = records
    .map(
      (r) => `<tr class="record outcome-${r.outcome}">
  <td><time datetime="${attr(r.ts)}">${escapeHtml(formatTimestamp(r.ts))}</time></td>
  <td class="origin">${escapeHtml(r.origin)}</td>
  <td class="cookies">${r.cookieNames.map((n) => `<code>${escapeHtml(n)}</code>`).join(", ")}</td>
  <td><span class="badge outcome ${r.outcome}">${r.outcome}</span></td>
  <td><span class="badge source ${r.source}">${r.source}</span></td>
  <td>${agreementCell(r)}</td>
</tr>`,
    )
    .join("\n");
  return `<table class="log">
  <thead>
    <tr><th>Time</th><th>Origin</th><th>Cookies</th><th>Outcome</th><th>Source</th><th>Agreement</th></tr>
  </thead>
  <tbody>
${rows}
  </tbody>
</table>`;
}

export function renderChainBadge(report: ChainReport): string {
  if (report.ok) {
    const noun = report.length === 1 ? "record" : "records";
    return `<span class="badge ok">chain intact (${report.length} ${noun})</span>`;
  }
  const where = report.firstBadIndex === null ? "" : ` at record ${report.firstBadIndex}`;
  const detail = report.detail ? `: ${escapeHtml(report.detail)}` : "";
  return `<span class="badge bad">chain broken${where}${detail}</span>`;
}

// -- taxonomy browser --------------------------------------------------------

function taxonomyNodeHtml(iri: string, taxonomy: Taxonomy): string {
  const node = taxonomy.nodes[iri];
  if (!node) return "";
  const label = labelFor(iri, taxonomy);
  const children = node.children
    .map((child) => taxonomyNodeHtml(child, taxonomy))
    .join("");
  const sub = children ? `<ul>${children}</ul>` : "";
  return `<li><span class="purpose-label" title="${attr(iri)}">${escapeHtml(label.text)}</span>${sub}</li>`;
}

export function renderTaxonomyTree(taxonomy: Taxonomy): string {
  const roots = taxonomy.roots
    .map((root) => taxonomyNodeHtml(root, taxonomy))
    .join("");
  return `<ul class="taxonomy">${roots}</ul>`;
}

// -- connection state --------------------------------------------------------

export function renderLiveState(state: string): string {
  const text = state === "open" ? "live" : state;
  return `<span class="badge live ${attr(state)}">${escapeHtml(text)}</span>`;
}
