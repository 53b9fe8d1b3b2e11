/**
 * Content-script wiring: harvest on load and on (debounced) DOM change,
 * ask the local service for annotations, underline the answers.
 *
 * The controller is a plain object so tests can drive it without the
 * chrome APIs; the bottom of the file binds it to storage and a
 * MutationObserver when running as an actual extension.
 */

import { Annotation, DEFAULT_ENDPOINT, Seed, annotate, fetchSeeds } from './client';
import { harvestText } from './harvest';
import { clearHighlights, renderHighlights } from './highlight';

export const MIN_DEBOUNCE_MS = 1000;

export interface EditGuard {
  /** Called right before/after the controller mutates the DOM itself,
   *  so the caller can mute its MutationObserver (flag tricks cannot
   *  outlive the observer's microtask). */
  before(): void;
  after(): void;
}

export interface ControllerOptions {
  endpoint?: string;
  enabled?: boolean;
  debounceMs?: number;
  guard?: EditGuard;
}

export interface Controller {
  /** Harvest, annotate, render.  No-op while disabled. */
  refresh(): Promise<void>;
  /** Debounced refresh for mutation bursts. */
  scheduleRefresh(): void;
  setEnabled(on: boolean): void;
  readonly enabled: boolean;
  dispose(): void;
}

export function createController(doc: Document, opts: ControllerOptions = {}): Controller {
  const endpoint = opts.endpoint ?? DEFAULT_ENDPOINT;
  const debounceMs = Math.max(MIN_DEBOUNCE_MS, opts.debounceMs ?? MIN_DEBOUNCE_MS);
  let enabled = opts.enabled ?? true;
  let seeds: Map<string, Seed> | null = null;
  let inflight: AbortController | null = null;
  let timer: ReturnType<typeof setTimeout> | null = null;

  const cancel = () => {
    if (inflight) {
      inflight.abort();
      inflight = null;
    }
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };

  const edit = (fn: () => void) => {
    opts.guard?.before();
    try {
      fn();
    } finally {
      opts.guard?.after();
    }
  };

  const renderOnce = async (signal: AbortSignal): Promise<boolean> => {
    edit(() => clearHighlights(doc));
    const harvest = harvestText(doc.body);
    if (!harvest.text.trim()) return true;
    const annotations: Annotation[] = await annotate(endpoint, harvest.text, signal);
    if (signal.aborted) return true;
    if (!seeds) {
      const list = await fetchSeeds(endpoint, signal);
      seeds = new Map(list.map((s) => [s.seed_id, s]));
    }
    if (signal.aborted) return true;
    let ok = false;
    edit(() => {
      ok = renderHighlights(doc, harvest, annotations, seeds!);
    });
    return ok;
  };

  const controller: Controller = {
    async refresh() {
      if (!enabled) return;
      cancel(); // latest wins
      const mine = new AbortController();
      inflight = mine;
      try {
        // One retry on a stale harvest (DOM changed mid-request).
        if (!(await renderOnce(mine.signal)) && !mine.signal.aborted) {
          await renderOnce(mine.signal);
        }
      } catch (err) {
        if (!mine.signal.aborted) throw err;
      } finally {
        if (inflight === mine) inflight = null;
      }
    },

    scheduleRefresh() {
      if (!enabled) return;
      if (timer !== null) clearTimeout(timer);
      timer = setTimeout(() => {
        timer = null;
        // Service may simply not be running; the next mutation retries.
        controller.refresh().catch(() => {});
      }, debounceMs);
    },

    setEnabled(on: boolean) {
      if (on === enabled) return;
      enabled = on;
      if (!on) {
        cancel();
        edit(() => clearHighlights(doc));
      } else {
        controller.refresh().catch(() => {});
      }
    },

    get enabled() {
      return enabled;
    },

    dispose() {
      cancel();
    },
  };
  return controller;
}

/** Sites list uses bare hostnames, one per line in the options page. */
export function siteDisabled(disabledSites: string[], hostname: string): boolean {
  return disabledSites.some((s) => s === hostname || hostname.endsWith(`.${s}`));
}

interface StoredSettings {
  endpoint?: string;
  disabledSites?: string[];
}

function bootstrap() {
  chrome.storage.sync.get(
    { endpoint: DEFAULT_ENDPOINT, disabledSites: [] },
    (items: StoredSettings) => {
      const observe = () =>
        observer.observe(document.body, { childList: true, characterData: true, subtree: true });
      const controller = createController(document, {
        endpoint: items.endpoint,
        enabled: !siteDisabled(items.disabledSites ?? [], location.hostname),
        guard: { before: () => observer.disconnect(), after: observe },
      });
      const observer = new MutationObserver(() => controller.scheduleRefresh());
      observe();

      chrome.storage.onChanged.addListener((changes) => {
        if (changes.disabledSites) {
          const now = siteDisabled(changes.disabledSites.newValue ?? [], location.hostname);
          controller.setEnabled(!now);
        }
      });

      if (controller.enabled) controller.refresh().catch(() => {});
    },
  );
}

if (typeof chrome !== 'undefined' && chrome.storage?.sync) {
  bootstrap();
}
