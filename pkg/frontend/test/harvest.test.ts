import { beforeEach, describe, expect, it } from 'vitest';

import { harvestText, segmentsFor } from '../src/harvest';

describe('harvestText', () => {
  beforeEach(() => {
    document.body.innerHTML = '';
  });

  it('concatenates visible text with a newline per block boundary', () => {
    document.body.innerHTML = '<p>One two.</p><p>Three four.</p>';
    const { text } = harvestText(document.body);
    expect(text).toBe('One two.\nThree four.\n');
  });

  it('keeps inline elements in the same line', () => {
    document.body.innerHTML = '<p>Nobody puts <b>TV</b> in a corner.</p>';
    const { text } = harvestText(document.body);
    expect(text).toBe('Nobody puts TV in a corner.\n');
  });

  it('skips script, style, and hidden elements', () => {
    document.body.innerHTML =
      '<p>Keep.</p>' +
      '<script>var x = 1;</script>' +
      '<style>p { color: red; }</style>' +
      '<p hidden>Attribute hidden.</p>' +
      '<p style="display: none">Display none.</p>' +
      '<p style="visibility: hidden">Visibility hidden.</p>';
    const { text } = harvestText(document.body);
    expect(text).toBe('Keep.\n');
  });

  it('does not stack newlines for nested blocks', () => {
    document.body.innerHTML = '<div><p>Inner.</p></div><p>After.</p>';
    const { text } = harvestText(document.body);
    expect(text).toBe('Inner.\nAfter.\n');
  });

  it('maps every node back to its exact slice of the text', () => {
    document.body.innerHTML = '<p>Alpha <i>beta</i> gamma.</p><p>Delta.</p>';
    const { text, map } = harvestText(document.body);
    expect(map.length).toBe(4);
    for (const entry of map) {
      expect(text.slice(entry.start, entry.start + entry.node.data.length)).toBe(entry.node.data);
    }
  });
});

describe('segmentsFor', () => {
  beforeEach(() => {
    document.body.innerHTML = '<p>Alpha <i>beta</i> gamma.</p><p>Delta.</p>';
  });

  it('resolves a span inside one node to a single segment', () => {
    const { text, map } = harvestText(document.body);
    const at = text.indexOf('gamma');
    const segs = segmentsFor(map, at, at + 5);
    expect(segs).not.toBeNull();
    expect(segs!.length).toBe(1);
    const { node, a, b } = segs![0];
    expect(node.data.slice(a, b)).toBe('gamma');
  });

  it('splits a span crossing inline elements into per-node segments', () => {
    const { text, map } = harvestText(document.body);
    const at = text.indexOf('Alpha beta gamma');
    const segs = segmentsFor(map, at, at + 'Alpha beta gamma'.length);
    expect(segs).not.toBeNull();
    expect(segs!.map((s) => s.node.data.slice(s.a, s.b))).toEqual(['Alpha ', 'beta', ' gamma']);
  });

  it('returns null for a span crossing a block boundary', () => {
    const { text, map } = harvestText(document.body);
    const at = text.indexOf('gamma.');
    // Reaches through the synthetic newline into the next paragraph.
    expect(segmentsFor(map, at, text.indexOf('Delta') + 5)).toBeNull();
  });

  it('returns null for empty or out-of-range spans', () => {
    const { text, map } = harvestText(document.body);
    expect(segmentsFor(map, 3, 3)).toBeNull();
    expect(segmentsFor(map, text.length, text.length + 4)).toBeNull();
  });
});
