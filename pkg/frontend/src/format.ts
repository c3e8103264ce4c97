/** Display helpers: IRI labels, retention text, digest shortening.
 * Pure string work so the render layer stays declarative. */

import type { Taxonomy } from "./types.js";

export const DPV = "https://w3id.org/dpv#";

/** Retention choices offered when narrowing a grant. These are the
 * engine's quantisation rungs: picking one yields an agreement with
 * exactly this duration rather than a rounded-down surprise. */
export const RETENTION_RUNGS: ReadonlyArray<{ seconds: number; label: string }> = [
  { seconds: 86_400, label: "1 day" },
  { seconds: 604_800, label: "7 days" },
  { seconds: 2_592_000, label: "30 days" },
  { seconds: 15_552_000, label: "180 days" },
  { seconds: 31_536_000, label: "1 year" },
  { seconds: 63_072_000, label: "2 years" },
  { seconds: 157_680_000, label: "5 years" },
];

/** Processing operations a grant can be narrowed to. Same set the
 * policy engine understands on both sides of the vocabulary bridge. */
export const KNOWN_ACTIONS: ReadonlyArray<{ iri: string; label: string }> = [
  { iri: DPV + "Access", label: "Access" },
  { iri: DPV + "Analyse", label: "Analyse" },
  { iri: DPV + "Collect", label: "Collect" },
  { iri: DPV + "Download", label: "Download" },
  { iri: DPV + "Erase", label: "Erase" },
  { iri: DPV + "Profiling", label: "Profiling" },
  { iri: DPV + "Share", label: "Share" },
  { iri: DPV + "Store", label: "Store" },
  { iri: DPV + "Transfer", label: "Transfer" },
  { iri: DPV + "Use", label: "Use" },
];

export function localName(iri: string): string {
  const hash = iri.lastIndexOf("#");
  if (hash >= 0 && hash < iri.length - 1) return iri.slice(hash + 1);
  const slash = iri.lastIndexOf("/");
  if (slash >= 0 && slash < iri.length - 1) return iri.slice(slash + 1);
  return iri;
}

export interface PurposeLabel {
  text: string;
  /** false when the IRI is not in the taxonomy: render the raw IRI
   * with a warning badge instead of pretending we understood it */
  known: boolean;
  definition: string;
}

export function labelFor(iri: string, taxonomy: Taxonomy | null): PurposeLabel {
  const node = taxonomy?.nodes[iri];
  if (node) {
    return {
      text: node.label || localName(iri),
      known: true,
      definition: node.definition ?? "",
    };
  }
  return { text: iri, known: false, definition: "" };
}

export function formatRetention(seconds: number | null): string {
  if (seconds === null) return "no limit";
  if (seconds === 0) return "none";
  for (const rung of RETENTION_RUNGS) {
    if (rung.seconds === seconds) return rung.label;
  }
  if (seconds % 31_536_000 === 0) return `${seconds / 31_536_000} years`;
  if (seconds % 86_400 === 0) {
    const days = seconds / 86_400;
    return days === 1 ? "1 day" : `${days} days`;
  }
  return `${seconds} s`;
}

export function shortDigest(hex: string): string {
  return hex.length > 12 ? hex.slice(0, 12) + "…" : hex;
}

export function formatTimestamp(iso: string): string {
  return iso.replace("T", " ").replace("Z", " UTC");
}
