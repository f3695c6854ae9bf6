// Typed client for the preview service HTTP API.

import { ObjectFieldSchema } from "./schema.js";
import { PreviewResponse } from "./preview.js";

export interface SchemaResponse {
  config_schema: ObjectFieldSchema;
  backend: string;
}

export interface VolumeEntry {
  id: string;
  subject: string;
  laterality: string;
  group: string;
  dims: [number, number, number];
  slices: { x: number; y: number; z: number };
}

export interface VolumesResponse {
  volumes: VolumeEntry[];
  backend: string;
}

export interface ExportResponse {
  path: string;
  config: unknown;
}

async function json<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status text
    }
    throw new Error(`${response.status}: ${detail}`);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  getSchema(): Promise<SchemaResponse> {
    return this.fetchFn(`${this.base}/api/schema`).then((r) =>
      json<SchemaResponse>(r),
    );
  }

  getVolumes(): Promise<VolumesResponse> {
    return this.fetchFn(`${this.base}/api/volumes`).then((r) =>
      json<VolumesResponse>(r),
    );
  }

  postPreview(body: unknown): Promise<PreviewResponse> {
    return this.fetchFn(`${this.base}/api/preview`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    }).then((r) => json<PreviewResponse>(r));
  }

  postExport(path: string, config: unknown): Promise<ExportResponse> {
    return this.fetchFn(`${this.base}/api/export`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ path, config }),
    }).then((r) => json<ExportResponse>(r));
  }
}
