import { describe, expect, it } from "vitest";

import {
  DPV,
  KNOWN_ACTIONS,
  RETENTION_RUNGS,
  formatRetention,
  formatTimestamp,
  labelFor,
  localName,
  shortDigest,
} from "../src/format.js";
import type { Taxonomy } from "../src/types.js";

const TAX: Taxonomy = {
  roots: [DPV + "Purpose"],
  nodes: {
    [DPV + "Purpose"]: { label: "Purpose", definition: null, children: [DPV + "Marketing"] },
    [DPV + "Marketing"]: {
      label: "Marketing",
      definition: "Purposes associated with marketing",
      children: [],
    },
    [DPV + "Unlabeled"]: { label: null, definition: null, children: [] },
  },
};

describe("localName", () => {
  it("takes the fragment when present", () => {
    expect(localName("https://w3id.org/dpv#Marketing")).toBe("Marketing");
  });

  it("falls back to the last path segment", () => {
    expect(localName("http://example.com/duration/two-year")).toBe("two-year");
  });

  it("returns the input when neither applies", () => {
    expect(localName("urn:odd")).toBe("urn:odd");
  });
});

describe("labelFor", () => {
  it("resolves known purposes to their label and definition", () => {
    const label = labelFor(DPV + "Marketing", TAX);
    expect(label).toEqual({
      text: "Marketing",
      known: true,
      definition: "Purposes associated with marketing",
    });
  });

  it("falls back to the local name for unlabeled nodes", () => {
    expect(labelFor(DPV + "Unlabeled", TAX).text).toBe("Unlabeled");
  });

  it("marks unknown IRIs and keeps them verbatim", () => {
    const label = labelFor("https://vendor.example/vocab#Frobnicate", TAX);
    expect(label.known).toBe(false);
    expect(label.text).toBe("https://vendor.example/vocab#Frobnicate");
  });

  it("copes with a missing taxonomy", () => {
    expect(labelFor(DPV + "Marketing", null).known).toBe(false);
  });
});

describe("formatRetention", () => {
  it("names the rungs", () => {
    expect(formatRetention(86_400)).toBe("1 day");
    expect(formatRetention(2_592_000)).toBe("30 days");
    expect(formatRetention(31_536_000)).toBe("1 year");
    expect(formatRetention(63_072_000)).toBe("2 years");
  });

  it("handles off-rung values", () => {
    expect(formatRetention(null)).toBe("no limit");
    expect(formatRetention(0)).toBe("none");
    expect(formatRetention(40 * 86_400)).toBe("40 days");
    expect(formatRetention(3 * 31_536_000)).toBe("3 years");
    expect(formatRetention(90_061)).toBe("90061 s");
  });
});

describe("retention rungs", () => {
  it("ascend strictly", () => {
    const seconds = RETENTION_RUNGS.map((r) => r.seconds);
    expect([...seconds].sort((a, b) => a - b)).toEqual(seconds);
    expect(new Set(seconds).size).toBe(seconds.length);
  });
});

describe("known actions", () => {
  it("live in the dpv namespace with matching labels", () => {
    for (const action of KNOWN_ACTIONS) {
      expect(action.iri).toBe(DPV + action.label);
    }
  });
});

describe("shortDigest", () => {
  it("truncates long hex with an ellipsis", () => {
    expect(shortDigest("4b058db06ff8e781d96894f89908b68f")).toBe("4b058db06ff8…");
  });

  it("keeps short values intact", () => {
    expect(shortDigest("abc")).toBe("abc");
  });
});

describe("formatTimestamp", () => {
  it("renders ISO instants readably", () => {
    expect(formatTimestamp("2026-08-15T00:00:00Z")).toBe("2026-08-15 00:00:00 UTC");
  });
});
