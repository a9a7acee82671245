/** Debounced, stale-discarding loader: one instance per panel keeps at most
 * one applied response in flight, so a burst of slider moves settles into a
 * single request and late responses for superseded parameters are dropped. */

export type Fetcher = (url: string) => Promise<unknown>;

export const DEBOUNCE_MS = 250;

export class PanelLoader {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private sequence = 0;

  constructor(
    private readonly fetcher: Fetcher,
    private readonly delayMs: number = DEBOUNCE_MS,
  ) {}

  /** Schedule a load of `url`; any pending or in-flight load is superseded.
   * `apply`/`onError` run only if this request is still the newest. */
  request(url: string, apply: (doc: unknown) => void, onError: (err: Error) => void): void {
    if (this.timer !== null) clearTimeout(this.timer);
    const token = ++this.sequence;
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fetcher(url).then(
        (doc) => {
          if (token === this.sequence) apply(doc);
        },
        (err: unknown) => {
          if (token === this.sequence) onError(err instanceof Error ? err : new Error(String(err)));
        },
      );
    }, this.delayMs);
  }

  /** Load immediately, skipping the debounce (e.g. initial page load). */
  requestNow(url: string, apply: (doc: unknown) => void, onError: (err: Error) => void): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    const token = ++this.sequence;
    this.fetcher(url).then(
      (doc) => {
        if (token === this.sequence) apply(doc);
      },
      (err: unknown) => {
        if (token === this.sequence) onError(err instanceof Error ? err : new Error(String(err)));
      },
    );
  }
}
