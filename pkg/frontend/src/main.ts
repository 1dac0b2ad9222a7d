import { ApiClient } from './api.js';
import { Store } from './state.js';
import { indexGraphNodes, renderApp } from './wizard.js';

const api = new ApiClient('');
const store = new Store();

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app container');
  }
  renderApp(root, store, api);
  try {
    const doc = await api.fetchGraph();
    indexGraphNodes(doc.graph);
    store.set({ contentVersion: doc.version });
  } catch (err) {
    store.set({ error: `Cannot load the question set: ${String(err)}` });
  }
}

void boot();
