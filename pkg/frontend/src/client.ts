/**
 * Typed client for the local snowclone service.
 *
 * Wire formats mirror the service exactly; the one convention worth
 * noting is that a verbatim seed quote arrives with score null (the
 * backend's infinite score has no JSON representation).
 */

export interface Annotation {
  char_start: number;
  char_end: number;
  seed_id: string;
  score: number | null; // null means the span is the seed quote verbatim
  matched_text: string;
}

export interface Seed {
  seed_id: string;
  quote: string[];
  origin_title: string;
  origin_note: string;
}

export interface Health {
  status: 'ok' | 'loading';
  version: string;
}

export const DEFAULT_ENDPOINT = 'http://127.0.0.1:8765';

async function getJson(url: string, init?: RequestInit): Promise<unknown> {
  const resp = await fetch(url, init);
  if (!resp.ok) {
    throw new Error(`snowclone service: ${init?.method ?? 'GET'} ${url} -> ${resp.status}`);
  }
  return resp.json();
}

export async function annotate(
  endpoint: string,
  text: string,
  signal?: AbortSignal,
): Promise<Annotation[]> {
  const body = await getJson(`${endpoint}/annotate`, {
    method: 'POST',
    headers: { 'Content-Type': 'application/json' },
    body: JSON.stringify({ text }),
    signal,
  });
  return (body as { annotations: Annotation[] }).annotations;
}

export async function fetchSeeds(endpoint: string, signal?: AbortSignal): Promise<Seed[]> {
  const body = await getJson(`${endpoint}/seeds`, { signal });
  return (body as { seeds: Seed[] }).seeds;
}

export async function fetchHealth(endpoint: string): Promise<Health> {
  return (await getJson(`${endpoint}/health`)) as Health;
}
