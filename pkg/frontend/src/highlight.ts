/**
 * Underline rendering and its exact inverse.
 *
 * Each annotated span is wrapped in <span class="snowclone-ref"> with a
 * native title tooltip carrying the origin.  Wraps are applied in
 * descending document order so earlier splitText calls never invalidate
 * the offsets of later ones, and clearHighlights unwraps + normalize()s
 * so the page serializes back to the exact pre-highlight HTML.
 */

import type { Annotation, Seed } from './client';
import { Harvest, Segment, segmentsFor } from './harvest';

export const HIGHLIGHT_CLASS = 'snowclone-ref';

export function tooltipText(a: Annotation, seed?: Seed): string {
  const score = a.score === null ? 'exact quote' : `score ${a.score.toFixed(2)}`;
  if (!seed) return `${a.seed_id} (${score})`;
  return `${seed.origin_title}: "${seed.quote.join(' ')}" (${score})`;
}

interface PlannedWrap {
  seg: Segment;
  globalStart: number;
  title: string;
  seedId: string;
}

/**
 * Apply annotations to the page the harvest came from.  The page must
 * be highlight-free and the harvest fresh: callers clearHighlights()
 * first, then harvest, then render (clearing afterwards would merge the
 * very text nodes the map points at).  Returns false without touching
 * the DOM when the harvest no longer matches; the caller should
 * re-harvest and retry once, then give up.
 */
export function renderHighlights(
  doc: Document,
  harvest: Harvest,
  annotations: Annotation[],
  seeds: Map<string, Seed>,
): boolean {
  const plan: PlannedWrap[] = [];
  for (const a of annotations) {
    if (harvest.text.slice(a.char_start, a.char_end) !== a.matched_text) return false;
    const segs = segmentsFor(harvest.map, a.char_start, a.char_end);
    if (segs === null) return false;
    // The map is only as fresh as the last harvest; confirm the spans
    // still read the same in the live DOM before touching anything.
    let live = '';
    for (const seg of segs) {
      if (!doc.contains(seg.node)) return false;
      live += seg.node.data.slice(seg.a, seg.b);
    }
    if (live !== a.matched_text) return false;
    const title = tooltipText(a, seeds.get(a.seed_id));
    for (const seg of segs) {
      plan.push({ seg, globalStart: a.char_start + seg.a, title, seedId: a.seed_id });
    }
  }

  plan.sort((x, y) => y.globalStart - x.globalStart);
  for (const { seg, title, seedId } of plan) {
    const { node, a, b } = seg;
    const mid = a > 0 ? node.splitText(a) : node;
    if (b - a < mid.data.length) mid.splitText(b - a);
    const span = doc.createElement('span');
    span.className = HIGHLIGHT_CLASS;
    span.style.textDecoration = 'underline';
    span.title = title;
    span.dataset.seedId = seedId;
    mid.parentNode!.insertBefore(span, mid);
    span.appendChild(mid);
  }
  return true;
}

/** Remove every highlight wrapper; the DOM serializes as before. */
export function clearHighlights(doc: Document): void {
  const parents = new Set<Node>();
  for (const span of Array.from(doc.querySelectorAll(`span.${HIGHLIGHT_CLASS}`))) {
    const parent = span.parentNode;
    if (!parent) continue;
    while (span.firstChild) parent.insertBefore(span.firstChild, span);
    parent.removeChild(span);
    parents.add(parent);
  }
  // Merge the text nodes splitText left behind.
  for (const parent of parents) parent.normalize();
}
