/** Page wiring: fetch state, render panels, push form input back to
 * the control API. All policy decisions happen server-side; this file
 * only moves JSON between the DOM and the API client.
 */

import { ApiError, ControlApi } from "./api.js";
import { PromptQueue } from "./store.js";
import { subscribeLive } from "./sse.js";
import { validateProfile } from "./validate.js";
import {
  renderChainBadge,
  renderLiveState,
  renderLogTable,
  renderPreferencesForm,
  renderPromptQueue,
  renderTaxonomyTree,
} from "./views.js";
import type {
  Decision,
  PreferenceRule,
  Profile,
  ResolveChoice,
  Taxonomy,
} from "./types.js";

const DEFAULT_RULE: PreferenceRule = {
  purpose: "https://w3id.org/dpv#Purpose",
  actions: null,
  maxRetentionSeconds: null,
  decision: "ask",
};

function select(root: ParentNode, selector: string): HTMLElement {
  const el = root.querySelector(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el as HTMLElement;
}

function readRetention(row: HTMLTableRowElement): number | null {
  const choice = row.querySelector<HTMLSelectElement>(".rule-retention")!.value;
  if (choice === "") return null;
  if (choice === "custom") {
    const raw = row.querySelector<HTMLInputElement>(".rule-retention-custom")!.value;
    return raw === "" ? null : Number(raw);
  }
  return Number(choice);
}

function readRules(form: HTMLElement): PreferenceRule[] {
  const rows = form.querySelectorAll<HTMLTableRowElement>("tr.rule");
  return [...rows].map((row) => {
    const purpose = row.querySelector<HTMLSelectElement>(".rule-purpose")!.value;
    const picked = row.querySelector<HTMLSelectElement>(".rule-actions")!.selectedOptions;
    const actions = [...picked].map((option) => option.value);
    const decision =
      row.querySelector<HTMLInputElement>("input.rule-decision:checked")?.value ?? "ask";
    return {
      purpose,
      actions: actions.length === 0 ? null : actions, // nothing picked = any
      maxRetentionSeconds: readRetention(row),
      decision: decision as Decision,
    };
  });
}

function readProfileForm(form: HTMLElement): Profile {
  return {
    owner: form.querySelector<HTMLInputElement>("input[name=owner]")!.value.trim(),
    defaultDecision: form.querySelector<HTMLSelectElement>(
      "select[name=defaultDecision]",
    )!.value as Decision,
    rules: readRules(form),
  };
}

function readChoices(card: HTMLElement): ResolveChoice[] {
  const questions = card.querySelectorAll<HTMLElement>("li.question");
  return [...questions].map((li) => {
    const permissionIndex = Number(li.dataset.permissionIndex);
    const checked = li.querySelector<HTMLInputElement>("input[type=radio]:checked");
    const decision = (checked?.value ?? "deny") as "allow" | "deny";
    const choice: ResolveChoice = { permissionIndex, decision };
    if (decision === "allow") {
      const boxes = li.querySelectorAll<HTMLInputElement>(".narrow-action:checked");
      if (boxes.length > 0) choice.narrowedActions = [...boxes].map((b) => b.value);
      const retention = li.querySelector<HTMLSelectElement>(".narrow-retention")!.value;
      if (retention !== "") choice.narrowedRetentionSeconds = Number(retention);
    }
    return choice;
  });
}

export async function init(doc: Document): Promise<void> {
  const api = new ControlApi();
  const queue = new PromptQueue();
  let taxonomy: Taxonomy | null = null;

  const promptsEl = select(doc, "#prompts");
  const prefsEl = select(doc, "#preferences");
  const logEl = select(doc, "#log");
  const chainEl = select(doc, "#chain");
  const taxonomyEl = select(doc, "#taxonomy");
  const liveEl = select(doc, "#live");
  const statusEl = select(doc, "#status");

  const flash = (message: string): void => {
    statusEl.textContent = message;
    statusEl.hidden = message === "";
  };

  const renderPrompts = (): void => {
    promptsEl.innerHTML = renderPromptQueue(queue.list(), taxonomy);
  };

  const refreshLog = async (): Promise<void> => {
    const [records, chain] = await Promise.all([api.log({ limit: 200 }), api.verifyChain()]);
    logEl.innerHTML = renderLogTable(records);
    chainEl.innerHTML = renderChainBadge(chain);
  };

  const refreshPending = async (): Promise<void> => {
    queue.replaceAll(await api.pending());
  };

  const renderPrefs = (profile: Profile): void => {
    prefsEl.innerHTML = renderPreferencesForm(profile, taxonomy);
  };

  queue.subscribe(renderPrompts);

  try {
    taxonomy = await api.taxonomy();
    taxonomyEl.innerHTML = renderTaxonomyTree(taxonomy);
    renderPrefs(await api.preferences());
    await refreshPending();
    await refreshLog();
  } catch (err) {
    flash(`failed to load: ${err instanceof Error ? err.message : err}`);
  }

  subscribeLive("/api/events", {
    onConnect: () => {
      // no replay on the stream: reconcile by refetching
      void refreshPending();
      void refreshLog();
    },
    onPending: (item) => queue.upsert(item),
    onResolved: (event) => {
      queue.applyResolved(event);
      void refreshLog();
    },
    onStateChange: (state) => {
      liveEl.innerHTML = renderLiveState(state);
    },
  });

  promptsEl.addEventListener("click", (ev) => {
    const button = (ev.target as HTMLElement).closest<HTMLElement>("button.resolve");
    if (!button) return;
    const card = button.closest<HTMLElement>("article.prompt");
    if (!card) return;
    const id = button.dataset.id ?? "";
    void (async () => {
      try {
        flash("");
        const result = await api.resolve(id, readChoices(card));
        flash(`resolved: ${result.outcome}`);
        await refreshLog();
      } catch (err) {
        if (err instanceof ApiError && (err.status === 409 || err.status === 404)) {
          // somebody else got there first; drop the stale card
          await refreshPending();
          return;
        }
        flash(`resolve failed: ${err instanceof Error ? err.message : err}`);
      }
    })();
  });

  prefsEl.addEventListener("click", (ev) => {
    const target = ev.target as HTMLElement;
    const form = select(prefsEl, "form.prefs");
    if (target.matches("button.rule-add")) {
      const current = readProfileForm(form);
      current.rules.push({ ...DEFAULT_RULE });
      renderPrefs(current);
    } else if (target.matches("button.rule-remove")) {
      const index = Number(target.dataset.index);
      const current = readProfileForm(form);
      current.rules.splice(index, 1);
      renderPrefs(current);
    }
  });

  prefsEl.addEventListener("change", (ev) => {
    const target = ev.target as HTMLElement;
    if (target.matches("select.rule-retention")) {
      const custom = (target as HTMLSelectElement).value === "custom";
      const input = target.closest("td")?.querySelector<HTMLInputElement>(".rule-retention-custom");
      if (input) input.hidden = !custom;
    }
  });

  prefsEl.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = select(prefsEl, "form.prefs");
    const errorEl = select(form, ".form-error");
    const profile = readProfileForm(form);
    const nodes = new Set(Object.keys(taxonomy?.nodes ?? {}));
    const problem = validateProfile(profile, nodes);
    if (problem !== null) {
      errorEl.textContent = problem;
      errorEl.hidden = false;
      return;
    }
    void (async () => {
      try {
        const saved = await api.savePreferences(profile);
        renderPrefs(saved);
        flash("preferences saved");
        // a profile change can supersede queued prompts
        await refreshPending();
      } catch (err) {
        errorEl.textContent = err instanceof Error ? err.message : String(err);
        errorEl.hidden = false;
      }
    })();
  });
}

if (typeof document !== "undefined") {
  void init(document);
}
