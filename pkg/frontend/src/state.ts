// Panel state: a single immutable object holding the current parameter
// values plus viewing position. Every mutation goes through setConfigValue,
// which clamps to the schema-declared bounds; there is no hidden parameter
// state anywhere else.

import {
  clampValue,
  ConfigValue,
  ControlDef,
  defaultConfig,
  ObjectFieldSchema,
} from "./schema.js";

export type AugmentKind = "style" | "remap" | "geo";

export interface PanelState {
  volumeId: string | null;
  axis: "x" | "y" | "z";
  index: number;
  config: Record<string, ConfigValue>;
  /** Which augmentation kinds the preview request includes. */
  enabled: Record<AugmentKind, boolean>;
}

export function initialState(schema: ObjectFieldSchema): PanelState {
  return {
    volumeId: null,
    axis: "z",
    index: 0,
    config: defaultConfig(schema),
    enabled: { style: false, remap: true, geo: false },
  };
}

function getIn(
  doc: Record<string, ConfigValue>,
  path: string[],
): ConfigValue | undefined {
  let node: ConfigValue | undefined = doc;
  for (const key of path) {
    if (node === undefined || typeof node !== "object" || Array.isArray(node)) {
      return undefined;
    }
    node = (node as Record<string, ConfigValue>)[key];
  }
  return node;
}

function setIn(
  doc: Record<string, ConfigValue>,
  path: string[],
  value: ConfigValue,
): Record<string, ConfigValue> {
  if (path.length === 0) throw new Error("empty path");
  const [head, ...rest] = path;
  const copy = { ...doc };
  if (rest.length === 0) {
    copy[head] = value;
  } else {
    const child = copy[head];
    if (typeof child !== "object" || Array.isArray(child)) {
      throw new Error(`not an object at ${head}`);
    }
    copy[head] = setIn({ ...(child as Record<string, ConfigValue>) }, rest, value);
  }
  return copy;
}

export function configValue(
  state: PanelState,
  path: string[],
): ConfigValue | undefined {
  return getIn(state.config, path);
}

/**
 * Clamped, pure state update. Returns the unchanged state object when the
 * candidate value is rejected (NaN, wrong shape), so callers can reset the
 * input element to the authoritative value.
 */
export function setConfigValue(
  state: PanelState,
  def: ControlDef,
  value: ConfigValue,
): PanelState {
  const clamped = clampValue(def, value);
  if (clamped === null) return state;
  return { ...state, config: setIn(state.config, def.path, clamped) };
}

export function setView(
  state: PanelState,
  view: Partial<Pick<PanelState, "volumeId" | "axis" | "index">>,
): PanelState {
  return { ...state, ...view };
}

export function toggleKind(
  state: PanelState,
  kind: AugmentKind,
  enabled: boolean,
): PanelState {
  return { ...state, enabled: { ...state.enabled, [kind]: enabled } };
}

/** Preview fragment: only the enabled augmentation kinds, values verbatim. */
export function fragmentFromState(
  state: PanelState,
): Record<string, ConfigValue> {
  const fragment: Record<string, ConfigValue> = {};
  if (state.enabled.style) {
    const style = state.config["style"] as Record<string, ConfigValue>;
    fragment["style"] = {
      alpha: style["alpha"],
      literal_eq1: style["literal_eq1"],
    };
  }
  if (state.enabled.remap) {
    fragment["remap"] = { ...(state.config["remap"] as Record<string, ConfigValue>) };
  }
  if (state.enabled.geo) {
    fragment["geo"] = { ...(state.config["geo"] as Record<string, ConfigValue>) };
  }
  return fragment;
}

export function previewRequest(state: PanelState): Record<string, unknown> | null {
  if (state.volumeId === null) return null;
  return {
    volume_id: state.volumeId,
    axis: state.axis,
    index: state.index,
    seed: state.config["seed"],
    fragment: fragmentFromState(state),
  };
}

/** The full config document, exported verbatim for the batch CLI. */
export function exportConfig(state: PanelState): Record<string, ConfigValue> {
  return state.config;
}
