// DOM wiring: builds the parameter panel from the service schema, renders
// preview pairs and the curve chart, and exports configs.

import { ApiClient, VolumeEntry } from "./api.js";
import { CurveChart } from "./curveChart.js";
import { PreviewLoop, PreviewResponse } from "./preview.js";
import { ConfigValue, ControlDef, controlsFromSchema, ObjectFieldSchema } from "./schema.js";
import {
  AugmentKind,
  PanelState,
  configValue,
  exportConfig,
  initialState,
  previewRequest,
  setConfigValue,
  setView,
  toggleKind,
} from "./state.js";

const KIND_LABELS: Record<AugmentKind, string> = {
  style: "Style transfer",
  remap: "Intensity remapping",
  geo: "Geometric (online)",
};

export class Panel {
  private state: PanelState;
  private controls: ControlDef[];
  private volumes: VolumeEntry[] = [];
  private chart: CurveChart;
  private loop: PreviewLoop;
  private inputs = new Map<string, HTMLElement[]>();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    schema: ObjectFieldSchema,
    private readonly backend: string,
  ) {
    this.state = initialState(schema);
    this.controls = controlsFromSchema(schema);
    this.root.innerHTML = layout(this.backend);
    this.chart = new CurveChart(
      this.root.querySelector("#curve-canvas") as HTMLCanvasElement,
    );
    this.chart.update(null);
    this.loop = new PreviewLoop(
      (body) => this.api.postPreview(body),
      {
        onResult: (response) => this.renderResult(response),
        onError: (error, body) => this.renderError(error, body),
      },
    );
    this.buildKindToggles();
    this.buildControls();
    this.bindExport();
  }

  async start(): Promise<void> {
    const listing = await this.api.getVolumes();
    this.volumes = listing.volumes;
    this.buildViewSelectors();
    if (this.volumes.length > 0) {
      this.state = setView(this.state, {
        volumeId: this.volumes[0].id,
        index: Math.floor(this.volumes[0].slices.z / 2),
      });
      this.syncViewSelectors();
      this.schedulePreview();
    }
  }

  // --- parameter controls ---------------------------------------------------

  private buildKindToggles(): void {
    const host = this.root.querySelector("#kind-toggles") as HTMLElement;
    (Object.keys(KIND_LABELS) as AugmentKind[]).forEach((kind) => {
      const label = document.createElement("label");
      label.className = "kind-toggle";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = this.state.enabled[kind];
      box.addEventListener("change", () => {
        this.state = toggleKind(this.state, kind, box.checked);
        this.schedulePreview();
      });
      label.append(box, ` ${KIND_LABELS[kind]}`);
      host.append(label);
    });
  }

  private buildControls(): void {
    const host = this.root.querySelector("#controls") as HTMLElement;
    const groups = new Map<string, HTMLElement>();
    for (const def of this.controls) {
      let groupEl = groups.get(def.group);
      if (!groupEl) {
        groupEl = document.createElement("fieldset");
        const legend = document.createElement("legend");
        legend.textContent = def.group || "General";
        groupEl.append(legend);
        groups.set(def.group, groupEl);
        host.append(groupEl);
      }
      groupEl.append(this.controlRow(def));
    }
  }

  private controlRow(def: ControlDef): HTMLElement {
    const row = document.createElement("div");
    row.className = "control-row";
    const title = document.createElement("span");
    title.className = "control-title";
    title.textContent = def.title;
    row.append(title);

    const key = def.path.join(".");
    if (def.kind === "readonly") {
      const value = document.createElement("code");
      value.textContent = JSON.stringify(def.default);
      row.append(value);
      return row;
    }
    if (def.kind === "boolean") {
      const box = document.createElement("input");
      box.type = "checkbox";
      box.checked = Boolean(configValue(this.state, def.path));
      box.addEventListener("change", () =>
        this.applyValue(def, box.checked, [box]),
      );
      this.inputs.set(key, [box]);
      row.append(box);
      return row;
    }
    if (def.kind === "range" || def.kind === "ratio") {
      const current = configValue(this.state, def.path) as number[];
      const fields = [0, 1].map((i) => {
        const input = document.createElement("input");
        input.type = "number";
        input.value = String(current[i]);
        if (def.minimum !== undefined) input.min = String(def.minimum);
        if (def.maximum !== undefined) input.max = String(def.maximum);
        if (def.step !== undefined) input.step = String(def.step);
        return input;
      });
      const read = () => fields.map((f) => Number(f.value)) as [number, number];
      fields.forEach((input) =>
        input.addEventListener("change", () =>
          this.applyValue(def, read(), fields),
        ),
      );
      this.inputs.set(key, fields);
      row.append(fields[0], document.createTextNode(" to "), fields[1]);
      return row;
    }
    // numeric scalar: slider plus a numeric entry that rejects out-of-range
    const slider = document.createElement("input");
    slider.type = "range";
    const entry = document.createElement("input");
    entry.type = "number";
    for (const input of [slider, entry]) {
      if (def.minimum !== undefined) input.min = String(def.minimum);
      if (def.maximum !== undefined) input.max = String(def.maximum);
      if (def.step !== undefined) input.step = String(def.step);
      input.value = String(configValue(this.state, def.path));
    }
    slider.addEventListener("input", () =>
      this.applyValue(def, Number(slider.value), [slider, entry]),
    );
    entry.addEventListener("change", () =>
      this.applyValue(def, Number(entry.value), [slider, entry]),
    );
    this.inputs.set(key, [slider, entry]);
    row.append(slider, entry);
    return row;
  }

  private applyValue(
    def: ControlDef,
    raw: ConfigValue,
    elements: HTMLElement[],
  ): void {
    this.state = setConfigValue(this.state, def, raw);
    // reflect the authoritative (possibly clamped/rejected) value back
    const value = configValue(this.state, def.path);
    elements.forEach((el, i) => {
      if (!(el instanceof HTMLInputElement)) return;
      if (el.type === "checkbox") el.checked = Boolean(value);
      else if (Array.isArray(value)) el.value = String(value[i]);
      else el.value = String(value);
    });
    this.schedulePreview();
  }

  // --- view selectors ---------------------------------------------------------

  private buildViewSelectors(): void {
    const volumeSel = this.root.querySelector("#volume-select") as HTMLSelectElement;
    volumeSel.innerHTML = "";
    for (const vol of this.volumes) {
      const opt = document.createElement("option");
      opt.value = vol.id;
      opt.textContent = `${vol.id} (${vol.laterality})`;
      volumeSel.append(opt);
    }
    volumeSel.addEventListener("change", () => {
      this.state = setView(this.state, { volumeId: volumeSel.value });
      this.clampSliceIndex();
      this.schedulePreview();
    });

    const axisSel = this.root.querySelector("#axis-select") as HTMLSelectElement;
    axisSel.addEventListener("change", () => {
      this.state = setView(this.state, {
        axis: axisSel.value as PanelState["axis"],
      });
      this.clampSliceIndex();
      this.schedulePreview();
    });

    const indexInput = this.root.querySelector("#slice-index") as HTMLInputElement;
    indexInput.addEventListener("input", () => {
      this.state = setView(this.state, { index: Number(indexInput.value) });
      this.schedulePreview();
    });
  }

  private currentVolume(): VolumeEntry | undefined {
    return this.volumes.find((v) => v.id === this.state.volumeId);
  }

  private clampSliceIndex(): void {
    const vol = this.currentVolume();
    if (!vol) return;
    const max = vol.slices[this.state.axis] - 1;
    this.state = setView(this.state, {
      index: Math.min(Math.max(this.state.index, 0), max),
    });
    this.syncViewSelectors();
  }

  private syncViewSelectors(): void {
    const vol = this.currentVolume();
    const indexInput = this.root.querySelector("#slice-index") as HTMLInputElement;
    if (vol) indexInput.max = String(vol.slices[this.state.axis] - 1);
    indexInput.value = String(this.state.index);
    const volumeSel = this.root.querySelector("#volume-select") as HTMLSelectElement;
    if (this.state.volumeId) volumeSel.value = this.state.volumeId;
  }

  // --- preview + export -------------------------------------------------------

  private schedulePreview(): void {
    const body = previewRequest(this.state);
    if (body !== null) this.loop.request(body);
  }

  private renderResult(response: PreviewResponse): void {
    (this.root.querySelector("#error-bar") as HTMLElement).textContent = "";
    const original = this.root.querySelector("#original-pane") as HTMLImageElement;
    const augmented = this.root.querySelector("#augmented-pane") as HTMLImageElement;
    original.src = `data:image/png;base64,${response.original_png_b64}`;
    augmented.src = `data:image/png;base64,${response.augmented_png_b64}`;
    this.chart.update(response.remap_curve);
  }

  private renderError(error: unknown, body: unknown): void {
    const bar = this.root.querySelector("#error-bar") as HTMLElement;
    bar.textContent = `preview failed: ${String(error)} for ${JSON.stringify(body)}`;
  }

  private bindExport(): void {
    const button = this.root.querySelector("#export-button") as HTMLButtonElement;
    const nameInput = this.root.querySelector("#export-path") as HTMLInputElement;
    const status = this.root.querySelector("#export-status") as HTMLElement;
    button.addEventListener("click", async () => {
      try {
        const result = await this.api.postExport(
          nameInput.value || "tuned_config.json",
          exportConfig(this.state),
        );
        status.textContent = `saved ${result.path}`;
      } catch (error) {
        status.textContent = `export failed: ${String(error)}`;
      }
    });
  }
}

function layout(backend: string): string {
  const backendNote =
    backend === "mock" ? `<span class="backend-note">mock backend</span>` : "";
  return `
  <header>
    <h1>volaug tuning panel</h1>
    ${backendNote}
  </header>
  <div id="error-bar"></div>
  <section class="viewer">
    <div class="selectors">
      <label>Volume <select id="volume-select"></select></label>
      <label>Axis
        <select id="axis-select">
          <option value="z" selected>z (axial)</option>
          <option value="y">y</option>
          <option value="x">x</option>
        </select>
      </label>
      <label>Slice <input id="slice-index" type="range" min="0" value="0"></label>
    </div>
    <div class="panes">
      <figure><img id="original-pane" alt="original slice"><figcaption>original</figcaption></figure>
      <figure><img id="augmented-pane" alt="augmented slice"><figcaption>augmented</figcaption></figure>
      <figure><canvas id="curve-canvas" width="256" height="256"></canvas><figcaption>remap curve</figcaption></figure>
    </div>
  </section>
  <section>
    <div id="kind-toggles"></div>
    <div id="controls"></div>
  </section>
  <footer>
    <input id="export-path" type="text" value="tuned_config.json">
    <button id="export-button">Export config</button>
    <span id="export-status"></span>
  </footer>`;
}

export async function boot(root: HTMLElement, api = new ApiClient()): Promise<Panel> {
  const schema = await api.getSchema();
  const panel = new Panel(api, root, schema.config_schema, schema.backend);
  await panel.start();
  return panel;
}
