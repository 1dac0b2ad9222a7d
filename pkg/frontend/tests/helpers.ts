// Shared test scaffolding: a fetch fake that replays a journey recorded
// against the real service, so the UI is tested against true wire shapes.

import fixture from './fixtures/chatbot-journey.json';

export { fixture };

export interface RecordedCall {
  method: string;
  path: string;
  body: unknown;
}

function jsonResponse(status: number, data: unknown) {
  return {
    ok: status < 400,
    status,
    statusText: String(status),
    json: async () => data,
  };
}

export function installFakeServer(): RecordedCall[] {
  const calls: RecordedCall[] = [];
  const fake = async (url: string, init?: RequestInit) => {
    const method = init?.method ?? 'GET';
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    calls.push({ method, path: url, body });

    if (method === 'GET' && url === '/v1/graph') {
      return jsonResponse(200, fixture.graph);
    }
    if (method === 'POST' && url === '/v1/sessions') {
      if (!body.tutorial_confirmed) {
        return jsonResponse(400, {
          error: { code: 'TUTORIAL_NOT_CONFIRMED', message: 'confirm the tutorial first' },
        });
      }
      return jsonResponse(201, fixture.create);
    }
    if (method === 'POST' && url === '/v1/sessions/fx-session/answers') {
      const recorded = fixture.answers.find((a) => a.node === body.node);
      if (!recorded) {
        return jsonResponse(409, {
          error: { code: 'OUT_OF_ORDER', message: `unexpected node ${body.node}` },
        });
      }
      if (JSON.stringify(body.answer) !== JSON.stringify(recorded.answer)) {
        throw new Error(
          `UI sent ${JSON.stringify(body.answer)} for ${body.node}, ` +
            `recorded journey expects ${JSON.stringify(recorded.answer)}`,
        );
      }
      return jsonResponse(200, recorded.response);
    }
    if (method === 'POST' && url === '/v1/sessions/fx-session/finalize') {
      return jsonResponse(200, fixture.finalize);
    }
    if (method === 'POST' && url === '/v1/events') {
      return jsonResponse(202, fixture.events_ack);
    }
    throw new Error(`unexpected request ${method} ${url}`);
  };
  globalThis.fetch = fake as unknown as typeof fetch;
  return calls;
}

export async function flush(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 0));
  await new Promise((resolve) => setTimeout(resolve, 0));
}

export function click(root: ParentNode, selector: string): void {
  const el = root.querySelector<HTMLElement>(selector);
  if (!el) {
    throw new Error(`no element matches ${selector}`);
  }
  el.click();
}

export function setCheckbox(root: ParentNode, selector: string, checked: boolean): void {
  const box = root.querySelector<HTMLInputElement>(selector);
  if (!box) {
    throw new Error(`no checkbox matches ${selector}`);
  }
  box.checked = checked;
  box.dispatchEvent(new Event('change', { bubbles: true }));
}
