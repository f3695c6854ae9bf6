// Remap-curve chart: the 256-entry lookup table exactly as returned by the
// service, drawn onto a canvas. The path data is a pure function of the
// curve so tests can check it without a DOM.

export interface Point {
  x: number;
  y: number;
}

/** Map a 0-255 -> 0-255 curve onto canvas pixel coordinates (y grows down). */
export function curveToPath(
  curve: readonly number[],
  width: number,
  height: number,
): Point[] {
  const n = curve.length;
  if (n < 2) return [];
  return curve.map((value, i) => ({
    x: (i / (n - 1)) * (width - 1),
    y: (height - 1) - (value / 255) * (height - 1),
  }));
}

export class CurveChart {
  private data: number[] | null = null;

  constructor(private readonly canvas: HTMLCanvasElement) {}

  /** The curve currently shown (the service payload, unmodified). */
  currentData(): number[] | null {
    return this.data;
  }

  update(curve: number[] | null): void {
    this.data = curve === null ? null : [...curve];
    this.draw();
  }

  private draw(): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) return;
    const { width, height } = this.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.strokeStyle = "#444";
    ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
    // identity diagonal for reference
    ctx.beginPath();
    ctx.setLineDash([4, 4]);
    ctx.moveTo(0, height - 1);
    ctx.lineTo(width - 1, 0);
    ctx.stroke();
    ctx.setLineDash([]);
    if (this.data === null) return;
    const path = curveToPath(this.data, width, height);
    ctx.beginPath();
    ctx.strokeStyle = "#7ecbff";
    ctx.lineWidth = 1.5;
    path.forEach((p, i) => (i === 0 ? ctx.moveTo(p.x, p.y) : ctx.lineTo(p.x, p.y)));
    ctx.stroke();
  }
}
