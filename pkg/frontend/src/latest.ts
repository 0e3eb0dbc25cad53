/** Supersede-by-latest request gating plus a debounce helper.
 *
 * Every outgoing request takes a stamp from the gate; a response is applied
 * only if its stamp is still the most recent one issued, so a slow early
 * response can never overwrite the answer to a newer edit. */

export class SequenceGate {
  private latest = 0;

  /** Stamp a new request; all earlier stamps become stale. */
  next(): number {
    return ++this.latest;
  }

  /** True only for the most recently issued stamp. */
  accept(seq: number): boolean {
    return seq === this.latest;
  }

  get current(): number {
    return this.latest;
  }
}

export type Debounced<Args extends unknown[]> = ((...args: Args) => void) & {
  cancel(): void;
};

/** Trailing-edge debounce: rapid calls collapse into one invocation with the
 * last arguments after `ms` of quiet. */
export function debounce<Args extends unknown[]>(
  fn: (...args: Args) => void,
  ms: number,
): Debounced<Args> {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return Object.assign(
    (...args: Args) => {
      if (handle !== undefined) clearTimeout(handle);
      handle = setTimeout(() => {
        handle = undefined;
        fn(...args);
      }, ms);
    },
    {
      cancel() {
        if (handle !== undefined) clearTimeout(handle);
        handle = undefined;
      },
    },
  );
}
