import type { RankRequest, RankResponse } from "./types.js";

export type RankPoster = (req: RankRequest) => Promise<RankResponse>;
export type Scheduler = (fn: () => void, ms: number) => unknown;
export type Canceller = (handle: unknown) => void;

/**
 * Debounced, latest-wins pipeline between the weight controls and POST /rank.
 *
 * A burst of slider moves collapses into a single request once the input has
 * been quiet for `debounceMs`. Every dispatched request carries a sequence
 * number; only the response to the newest dispatched request may mutate the
 * view, so slow stale responses are dropped.
 */
export class RankFlow {
  /** number of requests actually posted (observable for tests) */
  posts = 0;
  /** sequence of the newest dispatched request */
  private seq = 0;
  private timer: unknown = null;
  private pending: RankRequest | null = null;

  constructor(
    private readonly poster: RankPoster,
    private readonly apply: (resp: RankResponse) => void,
    private readonly debounceMs = 250,
    private readonly schedule: Scheduler = (fn, ms) => setTimeout(fn, ms),
    private readonly cancel: Canceller = (h) => clearTimeout(h as number),
    private readonly onError: (err: unknown) => void = () => {},
  ) {}

  /** Debounced request; used by sliders. */
  request(req: RankRequest): void {
    this.pending = req;
    if (this.timer !== null) this.cancel(this.timer);
    this.timer = this.schedule(() => this.flush(), this.debounceMs);
  }

  /** Immediate request; used by preset buttons. */
  requestNow(req: RankRequest): Promise<void> {
    this.pending = req;
    if (this.timer !== null) {
      this.cancel(this.timer);
      this.timer = null;
    }
    return this.flush();
  }

  private async flush(): Promise<void> {
    if (this.pending === null) return;
    const req = this.pending;
    this.pending = null;
    this.timer = null;
    const seq = ++this.seq;
    this.posts += 1;
    try {
      const resp = await this.poster(req);
      if (seq === this.seq) this.apply(resp); // stale responses are dropped
    } catch (err) {
      if (seq === this.seq) this.onError(err);
    }
  }
}
