import { ApiClient, ApiError } from './api.js';
import { Store, toWireAnswer, toggleSelection } from './state.js';
import type { MaterialView, OptionView, QuestionView, RawAnswer } from './types.js';

const KIND_TITLES: Record<string, string> = {
  definition_guidance: 'Definition',
  worked_example: 'Example',
  legal_text_link: 'Legal text',
  expert_contact: 'Expert contact',
};

export function renderApp(root: HTMLElement, store: Store, api: ApiClient): void {
  const render = () => {
    root.replaceChildren(buildScreen(store, api));
  };
  store.subscribe(render);
  render();
}

function buildScreen(store: Store, api: ApiClient): HTMLElement {
  const state = store.get();
  const screen = document.createElement('div');
  screen.className = 'screen';
  if (state.error) {
    const banner = document.createElement('div');
    banner.className = 'error-banner';
    banner.setAttribute('role', 'alert');
    banner.textContent = state.error;
    screen.appendChild(banner);
  }
  switch (state.screen) {
    case 'tutorial':
      screen.appendChild(tutorialScreen(store));
      break;
    case 'metadata':
      screen.appendChild(metadataScreen(store, api));
      break;
    case 'question':
      screen.appendChild(questionScreen(store, api));
      break;
    case 'report':
      screen.appendChild(reportScreen(store));
      break;
  }
  return screen;
}

function tutorialScreen(store: Store): HTMLElement {
  const panel = document.createElement('section');
  panel.innerHTML = `
    <h1>AI Act risk classification</h1>
    <p>This wizard walks you through the questions that place an AI system in
    one of the risk categories of the EU AI Act. Answer one question per
    screen; support material is available next to each question. You can
    change earlier answers at any time before finalizing.</p>
    <p>Work through the short tutorial first, then confirm below.</p>
  `;
  const label = document.createElement('label');
  label.className = 'tutorial-confirm';
  const checkbox = document.createElement('input');
  checkbox.type = 'checkbox';
  checkbox.id = 'tutorial-checkbox';
  checkbox.checked = store.get().tutorialChecked;
  checkbox.addEventListener('change', () => {
    store.set({ tutorialChecked: checkbox.checked });
  });
  label.appendChild(checkbox);
  label.append(' I have completed the tutorial');

  const start = document.createElement('button');
  start.id = 'start-button';
  start.textContent = 'Start';
  // the start action stays unreachable until the confirmation is ticked
  start.disabled = !store.get().tutorialChecked;
  start.addEventListener('click', () => {
    if (!store.get().tutorialChecked) {
      return;
    }
    store.set({ screen: 'metadata', error: null });
  });

  panel.appendChild(label);
  panel.appendChild(start);
  return panel;
}

function metadataScreen(store: Store, api: ApiClient): HTMLElement {
  const panel = document.createElement('section');
  panel.innerHTML = '<h1>Describe the system</h1>';

  const name = textInput('system-name', 'System name');
  const description = textInput('system-description', 'What does the system do?');
  const userRef = textInput('user-ref', 'Your reference (optional)');

  const begin = document.createElement('button');
  begin.id = 'begin-button';
  begin.textContent = 'Begin classification';
  begin.addEventListener('click', async () => {
    const metadata = {
      system_name: name.querySelector('input')!.value.trim(),
      description: description.querySelector('input')!.value.trim(),
    };
    store.set({ busy: true, error: null });
    try {
      const envelope = await api.createSession(
        metadata,
        store.get().tutorialChecked,
        userRef.querySelector('input')!.value.trim() || undefined,
      );
      store.set({
        busy: false,
        screen: 'question',
        sessionId: envelope.session.session_id,
        session: envelope.session,
        question: envelope.question,
        binaryChoice: null,
        selected: [],
        justification: '',
      });
      noteQuestionShown(api, store);
    } catch (err) {
      store.set({ busy: false, error: describeError(err) });
    }
  });

  panel.appendChild(name);
  panel.appendChild(description);
  panel.appendChild(userRef);
  panel.appendChild(begin);
  return panel;
}

function questionScreen(store: Store, api: ApiClient): HTMLElement {
  const state = store.get();
  const panel = document.createElement('section');
  const question = state.question;

  if (question === null) {
    // complete path: nothing left to answer, offer finalization
    panel.innerHTML = `
      <h1>All questions answered</h1>
      <p>Finalize to lock the session and produce the classification report.</p>
    `;
    panel.appendChild(answeredList(store, api));
    const finalize = document.createElement('button');
    finalize.id = 'finalize-button';
    finalize.textContent = 'Finalize and view report';
    finalize.addEventListener('click', async () => {
      store.set({ busy: true, error: null });
      try {
        const report = await api.finalizeSession(state.sessionId!);
        store.set({ busy: false, screen: 'report', report });
      } catch (err) {
        store.set({ busy: false, error: describeError(err) });
      }
    });
    panel.appendChild(finalize);
    return panel;
  }

  const heading = document.createElement('h1');
  heading.textContent = question.prompt;
  heading.dataset.node = question.id;
  panel.appendChild(heading);

  const legal = document.createElement('p');
  legal.className = 'legal-ref';
  legal.textContent = question.legal_ref;
  panel.appendChild(legal);

  if (question.phrasing_note) {
    const note = document.createElement('p');
    note.className = 'phrasing-note';
    note.textContent = question.phrasing_note;
    panel.appendChild(note);
  }

  panel.appendChild(supportBar(question.materials, state.sessionId!, question.id, api));
  panel.appendChild(
    question.answer_mode === 'binary'
      ? binaryControls(store)
      : multiSelectControls(store, question.options),
  );

  const justification = document.createElement('textarea');
  justification.id = 'justification';
  justification.placeholder = 'Why did you answer this way? (optional)';
  justification.value = state.justification;
  justification.addEventListener('input', () => {
    store.get().justification = justification.value;
  });
  panel.appendChild(justification);

  const submit = document.createElement('button');
  submit.id = 'continue-button';
  submit.textContent = 'Continue';
  submit.disabled = state.busy;
  submit.addEventListener('click', async () => {
    const answer = draftAnswer(store);
    if (answer === null) {
      store.set({ error: 'Pick an answer before continuing.' });
      return;
    }
    store.set({ busy: true, error: null });
    try {
      const envelope = await api.submitAnswer(
        state.sessionId!,
        question.id,
        answer,
        store.get().justification.trim() || undefined,
      );
      store.set({
        busy: false,
        session: envelope.session,
        question: envelope.question,
        binaryChoice: null,
        selected: [],
        justification: '',
      });
      noteQuestionShown(api, store);
    } catch (err) {
      await recoverFromError(err, store, api);
    }
  });
  panel.appendChild(submit);

  panel.appendChild(answeredList(store, api));
  return panel;
}

function binaryControls(store: Store): HTMLElement {
  const group = document.createElement('div');
  group.className = 'answer-group';
  group.setAttribute('role', 'radiogroup');
  for (const value of ['yes', 'no'] as const) {
    const label = document.createElement('label');
    const radio = document.createElement('input');
    radio.type = 'radio';
    radio.name = 'binary-answer';
    radio.value = value;
    radio.checked = store.get().binaryChoice === value;
    radio.addEventListener('change', () => {
      store.get().binaryChoice = value;
    });
    label.appendChild(radio);
    label.append(` ${value === 'yes' ? 'Yes' : 'No'}`);
    group.appendChild(label);
  }
  return group;
}

function multiSelectControls(store: Store, options: OptionView[]): HTMLElement {
  const group = document.createElement('div');
  group.className = 'answer-group';
  const noneId = options.find((o) => o.is_none)?.id ?? null;
  for (const option of options) {
    const label = document.createElement('label');
    const checkbox = document.createElement('input');
    checkbox.type = 'checkbox';
    checkbox.value = option.id;
    checkbox.dataset.optionId = option.id;
    checkbox.checked = store.get().selected.includes(option.id);
    checkbox.addEventListener('change', () => {
      store.set({ selected: toggleSelection(store.get().selected, option.id, noneId) });
    });
    label.appendChild(checkbox);
    label.append(` ${option.label}`);
    group.appendChild(label);
  }
  return group;
}

function draftAnswer(store: Store): RawAnswer | null {
  const state = store.get();
  if (state.question!.answer_mode === 'binary') {
    return state.binaryChoice;
  }
  const noneId = state.question!.options.find((o) => o.is_none)?.id ?? null;
  if (state.selected.length === 0) {
    return null;
  }
  return toWireAnswer(state.selected, noneId);
}

function supportBar(
  materials: MaterialView[],
  sessionId: string,
  nodeId: string,
  api: ApiClient,
): HTMLElement {
  const bar = document.createElement('div');
  bar.className = 'support-bar';
  for (const material of materials) {
    const button = document.createElement('button');
    button.className = 'support-button';
    button.dataset.materialId = material.id;
    button.textContent = `${KIND_TITLES[material.kind] ?? material.kind}: ${material.title}`;
    button.addEventListener('click', () => {
      // one telemetry event per open, not per render
      api.sendEvent({
        session_id: sessionId,
        kind: 'support_opened',
        material_id: material.id,
        node_context: nodeId,
      });
      openPopover(bar, material);
    });
    bar.appendChild(button);
  }
  return bar;
}

function openPopover(container: HTMLElement, material: MaterialView): void {
  container.querySelector('.support-popover')?.remove();
  const popover = document.createElement('div');
  popover.className = 'support-popover';
  popover.setAttribute('role', 'dialog');
  const title = document.createElement('h2');
  title.textContent = material.title;
  const body = document.createElement('p');
  body.textContent = material.body;
  popover.appendChild(title);
  popover.appendChild(body);
  if (material.external_url) {
    const link = document.createElement('a');
    link.href = material.external_url;
    link.target = '_blank';
    link.rel = 'noopener';
    link.textContent = 'Open the legal text';
    popover.appendChild(link);
  }
  const close = document.createElement('button');
  close.textContent = 'Close';
  close.addEventListener('click', () => popover.remove());
  popover.appendChild(close);
  container.appendChild(popover);
}

function answeredList(store: Store, api: ApiClient): HTMLElement {
  const state = store.get();
  const wrap = document.createElement('div');
  wrap.className = 'answered-list';
  const answers = state.session?.answers ?? [];
  if (answers.length === 0) {
    return wrap;
  }
  const heading = document.createElement('h2');
  heading.textContent = 'Answered so far';
  wrap.appendChild(heading);
  const list = document.createElement('ul');
  for (const answered of answers) {
    const item = document.createElement('li');
    const text = document.createElement('span');
    text.textContent = `${answered.node_id}: ${formatAnswer(answered.answer)}`;
    item.appendChild(text);
    const edit = document.createElement('button');
    edit.className = 'edit-button';
    edit.dataset.node = answered.node_id;
    edit.textContent = 'Change';
    edit.addEventListener('click', () => {
      openRevisionEditor(item, answered.node_id, answered.answer, store, api);
    });
    item.appendChild(edit);
    list.appendChild(item);
  }
  wrap.appendChild(list);
  return wrap;
}

interface NodeShape {
  answer_mode: string;
  options: { id: string; label: string }[];
}

// Filled at startup from the published graph document; used only to render
// revision editors for questions that are no longer on screen.
const nodeShapes = new Map<string, NodeShape>();

export function indexGraphNodes(graphDoc: unknown): void {
  const nodes = (graphDoc as { nodes?: NodeShape[] & { id: string }[] })?.nodes ?? [];
  for (const node of nodes as ({ id: string } & NodeShape)[]) {
    nodeShapes.set(node.id, { answer_mode: node.answer_mode, options: node.options ?? [] });
  }
}

function openRevisionEditor(
  item: HTMLElement,
  nodeId: string,
  previous: RawAnswer,
  store: Store,
  api: ApiClient,
): void {
  item.querySelector('.revision-editor')?.remove();
  const shape = nodeShapes.get(nodeId);
  if (!shape) {
    store.set({ error: `No editor available for ${nodeId}.` });
    return;
  }
  const editor = document.createElement('div');
  editor.className = 'revision-editor';

  let readAnswer: () => RawAnswer | null;
  if (shape.answer_mode === 'binary') {
    let choice: 'yes' | 'no' | null = previous === 'yes' || previous === 'no' ? previous : null;
    for (const value of ['yes', 'no'] as const) {
      const label = document.createElement('label');
      const radio = document.createElement('input');
      radio.type = 'radio';
      radio.name = `revise-${nodeId}`;
      radio.checked = choice === value;
      radio.addEventListener('change', () => {
        choice = value;
      });
      label.appendChild(radio);
      label.append(` ${value === 'yes' ? 'Yes' : 'No'}`);
      editor.appendChild(label);
    }
    readAnswer = () => choice;
  } else {
    let selected = Array.isArray(previous) ? [...previous] : [];
    const noneId = shape.options.some((o) => o.id === 'none') ? 'none' : null;
    if (noneId && selected.length === 0) {
      selected = [noneId];
    }
    for (const option of shape.options) {
      const label = document.createElement('label');
      const checkbox = document.createElement('input');
      checkbox.type = 'checkbox';
      checkbox.dataset.optionId = option.id;
      checkbox.checked = selected.includes(option.id);
      checkbox.addEventListener('change', () => {
        selected = toggleSelection(selected, option.id, noneId);
        for (const box of editor.querySelectorAll<HTMLInputElement>('input[type=checkbox]')) {
          box.checked = selected.includes(box.dataset.optionId!);
        }
      });
      label.appendChild(checkbox);
      label.append(` ${option.label}`);
      editor.appendChild(label);
    }
    readAnswer = () => (selected.length === 0 ? null : toWireAnswer(selected, noneId));
  }

  const save = document.createElement('button');
  save.className = 'save-revision';
  save.textContent = 'Save change';
  save.addEventListener('click', async () => {
    const answer = readAnswer();
    if (answer === null) {
      store.set({ error: 'Pick an answer before saving.' });
      return;
    }
    store.set({ busy: true, error: null });
    try {
      const envelope = await api.reviseAnswer(store.get().sessionId!, nodeId, answer);
      store.set({
        busy: false,
        session: envelope.session,
        question: envelope.question,
        binaryChoice: null,
        selected: [],
        justification: '',
      });
      noteQuestionShown(api, store);
    } catch (err) {
      await recoverFromError(err, store, api);
    }
  });
  editor.appendChild(save);
  item.appendChild(editor);
}

function reportScreen(store: Store): HTMLElement {
  const report = store.get().report!;
  const panel = document.createElement('section');
  panel.className = 'report';

  const heading = document.createElement('h1');
  heading.textContent = `Classification: ${report.result.categories.join(' + ')}`;
  panel.appendChild(heading);

  const labels = document.createElement('ul');
  labels.className = 'labels';
  for (const label of report.result.labels) {
    const item = document.createElement('li');
    item.textContent = label.basis ? `${label.label} - ${label.basis}` : label.label;
    labels.appendChild(item);
  }
  panel.appendChild(labels);

  const meta = document.createElement('p');
  meta.textContent =
    `${report.metadata.system_name} - assessed against content version ` +
    `${report.content_version} on ${report.generated_at}`;
  panel.appendChild(meta);

  const table = document.createElement('table');
  table.className = 'rationale';
  table.innerHTML = '<tr><th>Question</th><th>Answer</th><th>Legal basis</th></tr>';
  for (const entry of report.result.rationale) {
    const row = document.createElement('tr');
    for (const cell of [entry.node_id, formatAnswer(entry.answer), entry.legal_ref]) {
      const td = document.createElement('td');
      td.textContent = cell;
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  panel.appendChild(table);

  const restart = document.createElement('button');
  restart.id = 'restart-button';
  restart.textContent = 'Start a new classification';
  restart.addEventListener('click', () => {
    store.set({
      screen: 'tutorial',
      tutorialChecked: false,
      sessionId: null,
      session: null,
      question: null,
      binaryChoice: null,
      selected: [],
      justification: '',
      report: null,
      error: null,
    });
  });
  panel.appendChild(restart);
  return panel;
}

function textInput(id: string, label: string): HTMLElement {
  const wrap = document.createElement('label');
  wrap.className = 'field';
  wrap.append(label);
  const input = document.createElement('input');
  input.type = 'text';
  input.id = id;
  wrap.appendChild(input);
  return wrap;
}

function formatAnswer(answer: RawAnswer): string {
  if (Array.isArray(answer)) {
    return answer.length === 0 ? 'none apply' : answer.join(', ');
  }
  return answer;
}

function noteQuestionShown(api: ApiClient, store: Store): void {
  const state = store.get();
  if (state.sessionId && state.question) {
    api.sendEvent({
      session_id: state.sessionId,
      kind: 'question_shown',
      node_context: state.question.id,
    });
  }
}

function describeError(err: unknown): string {
  if (err instanceof ApiError) {
    return `${err.code}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

async function recoverFromError(err: unknown, store: Store, api: ApiClient): Promise<void> {
  // an out-of-order answer means our view is stale; resync from the server
  if (err instanceof ApiError && err.code === 'OUT_OF_ORDER' && store.get().sessionId) {
    try {
      const envelope = await api.getSession(store.get().sessionId!);
      store.set({
        busy: false,
        error: `${err.message} The view has been refreshed.`,
        session: envelope.session,
        question: envelope.question,
        binaryChoice: null,
        selected: [],
      });
      return;
    } catch {
      // fall through to the generic banner
    }
  }
  store.set({ busy: false, error: describeError(err) });
}
