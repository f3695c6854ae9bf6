// Schema-driven control model. Controls are generated from the service's
// /api/schema document rather than hard-coded, so new config fields appear
// in the panel without UI changes.

export interface NumberFieldSchema {
  type: "number" | "integer";
  title: string;
  default: number;
  minimum: number;
  maximum: number;
  step?: number;
}

export interface BooleanFieldSchema {
  type: "boolean";
  title: string;
  default: boolean;
}

export interface RangeFieldSchema {
  type: "range";
  title: string;
  default: [number, number];
  minimum: number;
  maximum: number;
  step?: number;
}

export interface RatioFieldSchema {
  type: "ratio";
  title: string;
  default: [number, number];
  minimum: number;
  maximum: number;
  step?: number;
}

export interface ObjectFieldSchema {
  type: "object";
  title?: string;
  readonly?: boolean;
  default?: unknown;
  properties?: Record<string, FieldSchema>;
}

export type FieldSchema =
  | NumberFieldSchema
  | BooleanFieldSchema
  | RangeFieldSchema
  | RatioFieldSchema
  | ObjectFieldSchema;

export type ConfigValue =
  | number
  | boolean
  | number[]
  | { [key: string]: ConfigValue };

export interface ControlDef {
  /** Config-document path, e.g. ["remap", "window"]. */
  path: string[];
  kind: "number" | "integer" | "boolean" | "range" | "ratio" | "readonly";
  title: string;
  group: string;
  minimum?: number;
  maximum?: number;
  step?: number;
  default: ConfigValue;
}

/** Flatten an object schema into one control per leaf field. */
export function controlsFromSchema(schema: ObjectFieldSchema): ControlDef[] {
  const out: ControlDef[] = [];
  walk(schema, [], schema.title ?? "", out);
  return out;
}

function walk(
  node: FieldSchema,
  path: string[],
  group: string,
  out: ControlDef[],
): void {
  if (node.type === "object") {
    if (node.readonly || !node.properties) {
      out.push({
        path,
        kind: "readonly",
        title: node.title ?? path.join("."),
        group,
        default: (node.default ?? {}) as ConfigValue,
      });
      return;
    }
    const groupTitle = path.length === 0 ? "" : (node.title ?? path.join("."));
    for (const [key, child] of Object.entries(node.properties)) {
      walk(child, [...path, key], groupTitle, out);
    }
    return;
  }
  if (node.type === "boolean") {
    out.push({
      path,
      kind: "boolean",
      title: node.title,
      group,
      default: node.default,
    });
    return;
  }
  out.push({
    path,
    kind: node.type,
    title: node.title,
    group,
    minimum: node.minimum,
    maximum: node.maximum,
    step: node.step,
    default: node.default as ConfigValue,
  });
}

/** Default config document implied by the schema. */
export function defaultConfig(
  schema: ObjectFieldSchema,
): Record<string, ConfigValue> {
  const out: Record<string, ConfigValue> = {};
  for (const [key, child] of Object.entries(schema.properties ?? {})) {
    if (child.type === "object") {
      if (child.readonly || !child.properties) {
        out[key] = (child.default ?? {}) as ConfigValue;
      } else {
        out[key] = defaultConfig(child);
      }
    } else {
      out[key] = child.default as ConfigValue;
    }
  }
  return out;
}

function clampNumber(def: ControlDef, value: number): number | null {
  if (!Number.isFinite(value)) return null;
  let v = value;
  if (def.minimum !== undefined) v = Math.max(def.minimum, v);
  if (def.maximum !== undefined) v = Math.min(def.maximum, v);
  if (def.kind === "integer") v = Math.round(v);
  return v;
}

/**
 * Clamp a candidate value to the control's declared bounds.
 * Returns null when the value cannot be interpreted at all (rejected input).
 */
export function clampValue(
  def: ControlDef,
  value: ConfigValue,
): ConfigValue | null {
  switch (def.kind) {
    case "boolean":
      return typeof value === "boolean" ? value : null;
    case "number":
    case "integer":
      return typeof value === "number" ? clampNumber(def, value) : null;
    case "range":
    case "ratio": {
      if (!Array.isArray(value) || value.length !== 2) return null;
      const pairKind = def.kind === "ratio" ? "integer" : "number";
      const lo = clampNumber({ ...def, kind: pairKind }, value[0]);
      const hi = clampNumber({ ...def, kind: pairKind }, value[1]);
      if (lo === null || hi === null) return null;
      // a range must stay ordered; collapse onto the moved endpoint
      return def.kind === "range" && lo > hi ? [hi, hi] : [lo, hi];
    }
    case "readonly":
      return null;
  }
}
