/** Runtime toggles. Everything here ships off unless a deployment opts in. */
export interface FeatureFlags {
  /** Click-through from the model-level ranking into the feature view. */
  reverseDrilldown: boolean;
}

export const DEFAULT_FLAGS: FeatureFlags = {
  reverseDrilldown: false,
};

/** Read overrides from the URL, e.g. ?flags=reverseDrilldown. */
export function flagsFromQuery(search: string, base: FeatureFlags = DEFAULT_FLAGS): FeatureFlags {
  const names = new URLSearchParams(search).get("flags")?.split(",") ?? [];
  const flags = { ...base };
  for (const name of names) {
    if (name.trim() === "reverseDrilldown") {
      flags.reverseDrilldown = true;
    }
  }
  return flags;
}
