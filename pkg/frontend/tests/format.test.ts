import { describe, expect, it } from "vitest";
import {
  MISSING_TOKEN,
  formatContribution,
  formatLabel,
  formatMargin,
  formatPointValue,
  formatProbability,
  formatRowTime,
} from "../src/format";

describe("formatting", () => {
  it("renders probability as a percentage", () => {
    expect(formatProbability(0.9669195909454998)).toBe("96.7%");
    expect(formatProbability(0.02)).toBe("2.0%");
  });

  it("renders margins and contributions with fixed precision", () => {
    expect(formatMargin(3.3751741031961444)).toBe("3.375");
    expect(formatContribution(1.25)).toBe("+1.2500");
    expect(formatContribution(-0.5)).toBe("-0.5000");
  });

  it("renders zero deltas without a sign", () => {
    expect(formatContribution(0)).toBe("0.0000");
    expect(formatContribution(-0)).toBe("0.0000");
  });

  it("keeps the missing token verbatim", () => {
    expect(MISSING_TOKEN).toBe("no reading");
    expect(formatPointValue(null)).toBe("no reading");
    expect(formatPointValue(2.4520714)).toBe("2.4521");
  });

  it("renders row ids as UTC timestamps", () => {
    expect(formatRowTime(1704067200)).toBe("2024-01-01T00:00:00Z");
  });

  it("describes labels in plant terms", () => {
    expect(formatLabel(1)).toBe("failure window");
    expect(formatLabel(0)).toBe("healthy");
    expect(formatLabel(null)).toBe("unlabeled");
  });
});
