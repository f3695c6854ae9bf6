// Preview request loop: debounced slider drags, at most one request in
// flight, stale responses discarded by sequence number so the rendered
// images always match the currently displayed parameters.

export interface PreviewResponse {
  original_png_b64: string;
  augmented_png_b64: string;
  remap_curve: number[] | null;
  backend: string;
}

export type PostFn = (body: unknown) => Promise<PreviewResponse>;

export interface LoopCallbacks {
  onResult: (response: PreviewResponse, body: unknown) => void;
  onError: (error: unknown, body: unknown) => void;
}

export const DEBOUNCE_MS = 150;

export class PreviewLoop {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: unknown | null = null;
  private inflight = false;
  private seq = 0;

  constructor(
    private readonly post: PostFn,
    private readonly callbacks: LoopCallbacks,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {}

  /** Schedule a preview for `body`; bursts collapse to the last body. */
  request(body: unknown): void {
    this.pending = body;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.flush();
    }, this.debounceMs);
  }

  private flush(): void {
    if (this.inflight || this.pending === null) return;
    const body = this.pending;
    this.pending = null;
    const mySeq = ++this.seq;
    this.inflight = true;
    this.post(body).then(
      (response) => this.settle(mySeq, body, response, null),
      (error) => this.settle(mySeq, body, null, error),
    );
  }

  private settle(
    seq: number,
    body: unknown,
    response: PreviewResponse | null,
    error: unknown,
  ): void {
    this.inflight = false;
    // superseded: newer parameters were requested while this was in flight
    const stale = seq !== this.seq || this.pending !== null;
    if (!stale) {
      if (response !== null) this.callbacks.onResult(response, body);
      else this.callbacks.onError(error, body);
    }
    if (this.pending !== null && this.timer === null) this.flush();
  }
}
