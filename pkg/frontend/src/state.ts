import type { QuestionView, ReportView, SessionView } from './types.js';

export type Screen = 'tutorial' | 'metadata' | 'question' | 'report';

export interface AppState {
  screen: Screen;
  contentVersion: string | null;
  tutorialChecked: boolean;
  sessionId: string | null;
  session: SessionView | null;
  question: QuestionView | null;
  // draft answer for the question on screen
  binaryChoice: 'yes' | 'no' | null;
  selected: string[];
  justification: string;
  report: ReportView | null;
  error: string | null;
  busy: boolean;
}

export const initialState: AppState = {
  screen: 'tutorial',
  contentVersion: null,
  tutorialChecked: false,
  sessionId: null,
  session: null,
  question: null,
  binaryChoice: null,
  selected: [],
  justification: '',
  report: null,
  error: null,
  busy: false,
};

type Listener = (state: AppState) => void;

export class Store {
  private state: AppState;
  private listeners: Listener[] = [];

  constructor(state: AppState = initialState) {
    this.state = { ...state };
  }

  get(): AppState {
    return this.state;
  }

  set(patch: Partial<AppState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}

/**
 * Toggle one checkbox in a multi-select answer.
 *
 * The none sentinel is exclusive both ways: picking it clears every other
 * option, and picking any other option clears it.
 */
export function toggleSelection(
  current: string[],
  optionId: string,
  noneId: string | null,
): string[] {
  if (current.includes(optionId)) {
    return current.filter((id) => id !== optionId);
  }
  if (noneId !== null && optionId === noneId) {
    return [noneId];
  }
  const kept = noneId === null ? current : current.filter((id) => id !== noneId);
  return [...kept, optionId];
}

/** Selections are sent with the none sentinel normalized away. */
export function toWireAnswer(selected: string[], noneId: string | null): string[] {
  if (noneId !== null && selected.length === 1 && selected[0] === noneId) {
    return [];
  }
  return selected;
}
