/**
 * Visible-text harvesting with a node/offset map.
 *
 * The service annotates character spans of whatever text we send it, so
 * the harvest has to be reversible: alongside the concatenated string we
 * keep, per contributing text node, its start offset in that string.
 * Block boundaries contribute a newline (a sentence terminator for the
 * backend) that maps to no node; annotations never span one.
 */

export interface MapEntry {
  node: Text;
  start: number; // offset of node.data[0] in the harvested text
}

export interface Harvest {
  text: string;
  map: MapEntry[];
}

export interface Segment {
  node: Text;
  a: number; // local start offset within node
  b: number; // local end offset (exclusive)
}

const SKIP_TAGS = new Set(['SCRIPT', 'STYLE', 'NOSCRIPT', 'TEMPLATE', 'TITLE', 'HEAD']);

// Tags treated as block boundaries; jsdom does not compute display for
// the UA stylesheet, so a tag list is more dependable than style lookup.
const BLOCK_TAGS = new Set([
  'ADDRESS', 'ARTICLE', 'ASIDE', 'BLOCKQUOTE', 'BR', 'DD', 'DIV', 'DL', 'DT',
  'FIGCAPTION', 'FIGURE', 'FOOTER', 'H1', 'H2', 'H3', 'H4', 'H5', 'H6',
  'HEADER', 'HR', 'LI', 'MAIN', 'NAV', 'OL', 'P', 'PRE', 'SECTION', 'TABLE',
  'TD', 'TH', 'TR', 'UL',
]);

function isHidden(el: Element): boolean {
  if ((el as HTMLElement).hidden) return true;
  const view = el.ownerDocument.defaultView;
  if (!view) return false;
  const style = view.getComputedStyle(el);
  return style.display === 'none' || style.visibility === 'hidden';
}

export function harvestText(root: Node): Harvest {
  let text = '';
  const map: MapEntry[] = [];

  const breakLine = () => {
    if (text.length > 0 && !text.endsWith('\n')) text += '\n';
  };

  const visit = (node: Node) => {
    if (node.nodeType === Node.TEXT_NODE) {
      const data = (node as Text).data;
      if (data.length > 0) {
        map.push({ node: node as Text, start: text.length });
        text += data;
      }
      return;
    }
    if (node.nodeType !== Node.ELEMENT_NODE) return;
    const el = node as Element;
    if (SKIP_TAGS.has(el.tagName) || isHidden(el)) return;
    const block = BLOCK_TAGS.has(el.tagName);
    if (block) breakLine();
    for (const child of Array.from(el.childNodes)) visit(child);
    if (block) breakLine();
  };

  visit(root);
  return { text, map };
}

/**
 * Resolve a [start, end) span of the harvested text into per-node
 * segments.  Returns null when the span is not fully covered by mapped
 * nodes (it crossed a synthetic newline, or the map is stale).
 */
export function segmentsFor(map: MapEntry[], start: number, end: number): Segment[] | null {
  if (start >= end) return null;
  const out: Segment[] = [];
  let covered = 0;
  for (const entry of map) {
    const nodeEnd = entry.start + entry.node.data.length;
    const a = Math.max(start, entry.start);
    const b = Math.min(end, nodeEnd);
    if (a < b) {
      out.push({ node: entry.node, a: a - entry.start, b: b - entry.start });
      covered += b - a;
    }
  }
  return covered === end - start ? out : null;
}
