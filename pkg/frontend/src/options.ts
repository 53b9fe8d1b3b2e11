/** Options page: service endpoint plus a per-site disable list. */

import { DEFAULT_ENDPOINT } from './client';

interface Settings {
  endpoint: string;
  disabledSites: string[];
}

const DEFAULTS: Settings = { endpoint: DEFAULT_ENDPOINT, disabledSites: [] };

function load() {
  chrome.storage.sync.get(DEFAULTS, (items) => {
    (document.getElementById('endpoint') as HTMLInputElement).value = items.endpoint;
    (document.getElementById('sites') as HTMLTextAreaElement).value = (
      items.disabledSites as string[]
    ).join('\n');
  });
}

function save() {
  const endpoint =
    (document.getElementById('endpoint') as HTMLInputElement).value.trim() || DEFAULT_ENDPOINT;
  const sites = (document.getElementById('sites') as HTMLTextAreaElement).value
    .split('\n')
    .map((s) => s.trim())
    .filter(Boolean);
  chrome.storage.sync.set({ endpoint, disabledSites: sites }, () => {
    const status = document.getElementById('status')!;
    status.textContent = 'Saved.';
    setTimeout(() => {
      status.textContent = '';
    }, 1500);
  });
}

document.addEventListener('DOMContentLoaded', () => {
  load();
  document.getElementById('save')!.addEventListener('click', save);
});
