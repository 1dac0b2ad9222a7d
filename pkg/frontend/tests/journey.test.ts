import { beforeEach, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { Store } from '../src/state.js';
import { renderApp } from '../src/wizard.js';

import { click, fixture, flush, installFakeServer, setCheckbox } from './helpers.js';

async function answerOnScreen(answer: 'yes' | 'no' | string[]): Promise<void> {
  if (Array.isArray(answer)) {
    if (answer.length === 0) {
      setCheckbox(document, 'input[data-option-id="none"]', true);
    } else {
      for (const id of answer) {
        setCheckbox(document, `input[data-option-id="${id}"]`, true);
      }
    }
  } else {
    const radio = document.querySelector<HTMLInputElement>(
      `input[name="binary-answer"][value="${answer}"]`,
    )!;
    radio.checked = true;
    radio.dispatchEvent(new Event('change', { bubbles: true }));
  }
  click(document, '#continue-button');
  await flush();
}

describe('chatbot journey end to end', () => {
  let store: Store;
  let calls: ReturnType<typeof installFakeServer>;

  beforeEach(() => {
    calls = installFakeServer();
    document.body.innerHTML = '<main id="app"></main>';
    store = new Store();
    renderApp(document.getElementById('app')!, store, new ApiClient(''));
  });

  it('walks a customer-support chatbot to a Limited risk report', async () => {
    setCheckbox(document, '#tutorial-checkbox', true);
    click(document, '#start-button');

    document.querySelector<HTMLInputElement>('#system-name')!.value = 'Helpdesk bot';
    document.querySelector<HTMLInputElement>('#system-description')!.value =
      'Retrieval chatbot for support tickets';
    click(document, '#begin-button');
    await flush();

    for (const step of fixture.answers) {
      const heading = document.querySelector<HTMLElement>('h1[data-node]')!;
      expect(heading.dataset.node).toBe(step.node);
      await answerOnScreen(step.answer as 'yes' | 'no' | string[]);
    }

    // path complete: finalize and read the report
    expect(document.body.textContent).toContain('All questions answered');
    click(document, '#finalize-button');
    await flush();

    const text = document.body.textContent!;
    expect(text).toContain('Classification: Limited risk');
    expect(text).toContain('LIMITED(Art50_1)');
    expect(text).toContain('Art. 50.1');

    // the wizard consumed only the HTTP interface, with the recorded payloads
    const answerCalls = calls.filter((c) => c.path.endsWith('/answers'));
    expect(answerCalls.map((c) => (c.body as { node: string }).node)).toEqual(
      fixture.answers.map((a) => a.node),
    );
  });

  it('sends one support_opened event per material open', async () => {
    setCheckbox(document, '#tutorial-checkbox', true);
    click(document, '#start-button');
    document.querySelector<HTMLInputElement>('#system-name')!.value = 'Helpdesk bot';
    document.querySelector<HTMLInputElement>('#system-description')!.value = 'chatbot';
    click(document, '#begin-button');
    await flush();

    const firstSupport = document.querySelector<HTMLButtonElement>('.support-button')!;
    const materialId = firstSupport.dataset.materialId!;
    firstSupport.click();
    await flush();
    expect(document.querySelector('.support-popover')).not.toBeNull();

    const opens = calls.filter(
      (c) => c.path === '/v1/events' && (c.body as { kind?: string }).kind === 'support_opened',
    );
    expect(opens).toHaveLength(1);
    expect((opens[0].body as { material_id: string }).material_id).toBe(materialId);

    // closing and reopening is a second deliberate open
    click(document, '.support-popover button:last-of-type');
    document.querySelector<HTMLButtonElement>('.support-button')!.click();
    await flush();
    expect(
      calls.filter(
        (c) => c.path === '/v1/events' && (c.body as { kind?: string }).kind === 'support_opened',
      ),
    ).toHaveLength(2);
  });
});
