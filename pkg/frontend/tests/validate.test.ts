import { describe, expect, it } from "vitest";

import { isAbsoluteIri, validateProfile } from "../src/validate.js";
import type { Profile } from "../src/types.js";

const DPV = "https://w3id.org/dpv#";
const NODES = new Set([DPV + "Purpose", DPV + "Marketing", DPV + "Analytics"]);

function profile(partial: Partial<Profile> = {}): Profile {
  return {
    owner: "https://alice.example/profile#me",
    defaultDecision: "ask",
    rules: [],
    ...partial,
  };
}

describe("isAbsoluteIri", () => {
  it("accepts scheme-prefixed values", () => {
    expect(isAbsoluteIri("https://x.example/")).toBe(true);
    expect(isAbsoluteIri("urn:app:prefs")).toBe(true);
    expect(isAbsoluteIri("a+b-c.d:rest")).toBe(true);
  });

  it("rejects values without a scheme", () => {
    expect(isAbsoluteIri("not an iri")).toBe(false);
    expect(isAbsoluteIri("/relative/path")).toBe(false);
    expect(isAbsoluteIri("1st:scheme-must-start-with-a-letter")).toBe(false);
    expect(isAbsoluteIri("")).toBe(false);
  });
});

describe("validateProfile", () => {
  it("passes a well-formed profile", () => {
    const p = profile({
      rules: [
        {
          purpose: DPV + "Marketing",
          actions: [DPV + "Store"],
          maxRetentionSeconds: 2_592_000,
          decision: "allow",
        },
        { purpose: DPV + "Analytics", actions: null, maxRetentionSeconds: null, decision: "deny" },
      ],
    });
    expect(validateProfile(p, NODES)).toBeNull();
  });

  it("rejects a relative owner", () => {
    expect(validateProfile(profile({ owner: "alice" }), NODES)).toBe(
      "owner must be an absolute IRI string",
    );
    expect(validateProfile(profile({ owner: "" }), NODES)).toBe(
      "owner must be an absolute IRI string",
    );
  });

  it("rejects an empty actions list", () => {
    const p = profile({
      rules: [{ purpose: DPV + "Marketing", actions: [], maxRetentionSeconds: null, decision: "allow" }],
    });
    expect(validateProfile(p, NODES)).toBe(
      "rule 0: actions must be null or a non-empty list of IRIs",
    );
  });

  it("rejects a non-IRI action", () => {
    const p = profile({
      rules: [{ purpose: DPV + "Marketing", actions: ["store"], maxRetentionSeconds: null, decision: "allow" }],
    });
    expect(validateProfile(p, NODES)).toBe(
      "rule 0: actions must be null or a non-empty list of IRIs",
    );
  });

  it("rejects fractional and negative retention", () => {
    for (const bad of [-1, 1.5]) {
      const p = profile({
        rules: [{ purpose: DPV + "Marketing", actions: null, maxRetentionSeconds: bad, decision: "allow" }],
      });
      expect(validateProfile(p, NODES)).toBe(
        "rule 0: maxRetentionSeconds must be a non-negative integer",
      );
    }
  });

  it("rejects purposes outside the taxonomy", () => {
    const p = profile({
      rules: [{ purpose: "https://vendor.example/vocab#Frobnicate", actions: null, maxRetentionSeconds: null, decision: "ask" }],
    });
    expect(validateProfile(p, NODES)).toBe(
      "purpose not in taxonomy: https://vendor.example/vocab#Frobnicate",
    );
  });

  it("rejects unknown decision keywords like the server does", () => {
    const p = profile({ defaultDecision: "maybe" as Profile["defaultDecision"] });
    expect(validateProfile(p, NODES)).toBe("unknown decision keyword: 'maybe'");
  });

  it("flags duplicate rules regardless of action order", () => {
    const a = DPV + "Store";
    const b = DPV + "Profiling";
    const p = profile({
      rules: [
        { purpose: DPV + "Marketing", actions: [a, b], maxRetentionSeconds: null, decision: "allow" },
        { purpose: DPV + "Marketing", actions: [b, a, b], maxRetentionSeconds: 86_400, decision: "deny" },
      ],
    });
    expect(validateProfile(p, NODES)).toBe(
      `duplicate rule for purpose ${DPV}Marketing with actions ['${b}', '${a}']`,
    );
  });

  it("flags duplicate wildcard rules with the ANY marker", () => {
    const p = profile({
      rules: [
        { purpose: DPV + "Marketing", actions: null, maxRetentionSeconds: null, decision: "allow" },
        { purpose: DPV + "Marketing", actions: null, maxRetentionSeconds: null, decision: "deny" },
      ],
    });
    expect(validateProfile(p, NODES)).toBe(
      `duplicate rule for purpose ${DPV}Marketing with actions ANY`,
    );
  });

  it("keeps rules with different actions apart", () => {
    const p = profile({
      rules: [
        { purpose: DPV + "Marketing", actions: [DPV + "Store"], maxRetentionSeconds: null, decision: "allow" },
        { purpose: DPV + "Marketing", actions: null, maxRetentionSeconds: null, decision: "deny" },
      ],
    });
    expect(validateProfile(p, NODES)).toBeNull();
  });
});
