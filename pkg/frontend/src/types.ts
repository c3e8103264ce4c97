// Mirrors docs/control-api.md; the server is the source of truth.

export type Decision = "allow" | "deny" | "ask";
export type Outcome = "granted" | "partial" | "denied" | "pending";
export type RecordSource = "auto" | "user" | "negotiated";

export interface PreferenceRule {
  purpose: string;
  actions: string[] | null;
  maxRetentionSeconds: number | null;
  decision: Decision;
}

export interface Profile {
  owner: string;
  defaultDecision: Decision;
  rules: PreferenceRule[];
}

export interface PendingQuestion {
  permissionIndex: number;
  purpose: string;
  reason: string;
  /** action IRIs in the vocabulary the request used */
  requestedActions: string[];
  /** raw duration literal of the retention constraint, if any */
  requestedRetention: string | null;
}

export interface PendingItem {
  id: string;
  origin: string;
  requestDigest: string;
  createdAt: string;
  cookieNames: string[];
  questions: PendingQuestion[];
}

export interface ResolveChoice {
  permissionIndex: number;
  decision: "allow" | "deny";
  narrowedActions?: string[];
  narrowedRetentionSeconds?: number;
}

export interface ResolveResult {
  outcome: Outcome;
  requestDigest: string;
  grantedIndexes: number[];
}

export interface LogRecord {
  ts: string;
  origin: string;
  cookieNames: string[];
  requestDigest: string;
  outcome: Outcome;
  source: RecordSource;
  prevHash: string;
  agreementDigest: string | null;
  agreementTurtle: string | null;
}

export interface ChainReport {
  ok: boolean;
  length: number;
  firstBadIndex: number | null;
  detail: string | null;
}

export interface TaxonomyNode {
  label: string | null;
  definition: string | null;
  children: string[];
}

export interface Taxonomy {
  roots: string[];
  nodes: Record<string, TaxonomyNode>;
}

/** `outcome` is present when a human resolved the prompt; `resolution`
 * when a profile change superseded it. */
export interface ResolvedEvent {
  id: string;
  origin: string;
  outcome?: Outcome;
  resolution?: "superseded";
}
