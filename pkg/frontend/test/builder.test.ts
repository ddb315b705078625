/** Grey-out math in isolation: the option set mirrors the server's gate. */

import { describe, expect, it } from "vitest";

import { aggregationOption, optionsForAttribute, requiredGrouping } from "../src/builder.js";
import type { NodeProperties } from "../src/types.js";

const PROPS: NodeProperties = {
  table: "T",
  dimension_attributes: ["City", "State", "Country", "Year"],
  properties: [
    {
      attribute: "Pop", fn: "SUM", x: ["City", "Country", "State"],
      x_d: ["City", "Country", "State", "Year"], x_f: ["Year"],
      pending: ["MinimizeXd"], provenance: "Declared",
    },
    {
      attribute: "City", fn: "COUNTDISTINCT", x: ["Country", "State", "Year"],
      x_d: null, x_f: [], pending: [], provenance: "Defaulted",
    },
  ],
};

describe("requiredGrouping", () => {
  it("is the dimensions minus the aggregable set minus the attribute", () => {
    expect(requiredGrouping(PROPS, "Pop", ["City", "Country", "State"]))
      .toEqual(["Year"]);
    expect(requiredGrouping(PROPS, "City", ["Country", "State", "Year"]))
      .toEqual([]);
  });
});

describe("aggregationOption", () => {
  it("enables a grouping that keeps the required attributes", () => {
    expect(aggregationOption(PROPS, "SUM", "Pop", ["Year"]).enabled).toBe(true);
    expect(aggregationOption(PROPS, "SUM", "Pop", ["Year", "State"]).enabled).toBe(true);
  });

  it("disables a grouping that drops a required attribute", () => {
    const opt = aggregationOption(PROPS, "SUM", "Pop", ["State", "Country"]);
    expect(opt.enabled).toBe(false);
    expect(opt.tooltip).toBe("allowed along {City, Country, State}");
  });

  it("disables functions without any property", () => {
    const opt = aggregationOption(PROPS, "AVG", "Pop", ["Year"], "BASE");
    expect(opt.enabled).toBe(false);
    expect(opt.tooltip).toContain("no aggregable property");
    expect(opt.tooltip).toContain("backtrack to BASE");
  });

  it("counting a dimension attribute needs no grouping at all", () => {
    expect(aggregationOption(PROPS, "COUNTDISTINCT", "City", []).enabled).toBe(true);
  });
});

describe("optionsForAttribute", () => {
  it("emits one option per function and grouping candidate", () => {
    const opts = optionsForAttribute(PROPS, "Pop", [["Year"], []]);
    expect(opts).toHaveLength(12);
    const enabled = opts.filter((o) => o.enabled);
    expect(enabled).toEqual([
      expect.objectContaining({ fn: "SUM", groupBy: ["Year"] }),
    ]);
  });
});
