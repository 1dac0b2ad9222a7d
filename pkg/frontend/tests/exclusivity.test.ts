import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { Store, initialState, toWireAnswer, toggleSelection } from '../src/state.js';
import { renderApp } from '../src/wizard.js';
import type { QuestionView, SessionView } from '../src/types.js';

import { fixture, installFakeServer, setCheckbox } from './helpers.js';

describe('toggleSelection', () => {
  it('picking the none sentinel clears every other option', () => {
    expect(toggleSelection(['a', 'b'], 'none', 'none')).toEqual(['none']);
  });

  it('picking a substantive option clears the none sentinel', () => {
    expect(toggleSelection(['none'], 'a', 'none')).toEqual(['a']);
  });

  it('toggling an option off removes only that option', () => {
    expect(toggleSelection(['a', 'b'], 'b', 'none')).toEqual(['a']);
  });

  it('works without a none sentinel', () => {
    expect(toggleSelection(['a'], 'b', null)).toEqual(['a', 'b']);
  });

  it('normalizes a lone none sentinel to the empty selection on the wire', () => {
    expect(toWireAnswer(['none'], 'none')).toEqual([]);
    expect(toWireAnswer(['a'], 'none')).toEqual(['a']);
  });
});

describe('multi-select checkboxes', () => {
  let store: Store;

  beforeEach(() => {
    installFakeServer();
    document.body.innerHTML = '<main id="app"></main>';
    // jump straight to a rendered multi-select question from the recorded journey
    const question = fixture.answers[0].response.question as QuestionView;
    const session = fixture.create.session as SessionView;
    store = new Store({
      ...initialState,
      screen: 'question',
      sessionId: 'fx-session',
      session,
      question,
    });
    renderApp(document.getElementById('app')!, store, new ApiClient(''));
  });

  const boxFor = (id: string) =>
    document.querySelector<HTMLInputElement>(`input[data-option-id="${id}"]`)!;

  it('checking none unchecks all other options', () => {
    setCheckbox(document, 'input[data-option-id="military-defence-security"]', true);
    setCheckbox(document, 'input[data-option-id="scientific-research"]', true);
    expect(store.get().selected).toEqual(['military-defence-security', 'scientific-research']);

    setCheckbox(document, 'input[data-option-id="none"]', true);
    expect(store.get().selected).toEqual(['none']);
    expect(boxFor('military-defence-security').checked).toBe(false);
    expect(boxFor('scientific-research').checked).toBe(false);
    expect(boxFor('none').checked).toBe(true);
  });

  it('checking any option unchecks none', () => {
    setCheckbox(document, 'input[data-option-id="none"]', true);
    setCheckbox(document, 'input[data-option-id="scientific-research"]', true);
    expect(store.get().selected).toEqual(['scientific-research']);
    expect(boxFor('none').checked).toBe(false);
  });
});
