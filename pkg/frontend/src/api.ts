import type {
  GraphDocument,
  RawAnswer,
  ReportView,
  SessionEnvelope,
  SystemMetadata,
  TelemetryEvent,
} from './types.js';

export class ApiError extends Error {
  code: string;
  status: number;
  field?: string;
  current?: string;

  constructor(status: number, code: string, message: string, field?: string, current?: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
    this.code = code;
    this.field = field;
    this.current = current;
  }
}

async function request<T>(baseUrl: string, path: string, init?: RequestInit): Promise<T> {
  const res = await fetch(baseUrl + path, {
    headers: { 'Content-Type': 'application/json' },
    ...init,
  });
  if (!res.ok) {
    let code = 'HTTP_ERROR';
    let message = `${res.status} ${res.statusText}`;
    let field: string | undefined;
    let current: string | undefined;
    try {
      const body = await res.json();
      if (body && body.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
        field = body.error.field;
        current = body.error.current;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiError(res.status, code, message, field, current);
  }
  return (await res.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl = '') {}

  fetchGraph(): Promise<GraphDocument> {
    return request(this.baseUrl, '/v1/graph');
  }

  createSession(
    metadata: SystemMetadata,
    tutorialConfirmed: boolean,
    userRef?: string,
  ): Promise<SessionEnvelope> {
    const body: Record<string, unknown> = {
      metadata,
      tutorial_confirmed: tutorialConfirmed,
    };
    if (userRef) {
      body.user_ref = userRef;
    }
    return request(this.baseUrl, '/v1/sessions', {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }

  getSession(sessionId: string): Promise<SessionEnvelope> {
    return request(this.baseUrl, `/v1/sessions/${sessionId}`);
  }

  submitAnswer(
    sessionId: string,
    node: string,
    answer: RawAnswer,
    justification?: string,
  ): Promise<SessionEnvelope> {
    const body: Record<string, unknown> = { node, answer };
    if (justification) {
      body.justification = justification;
    }
    return request(this.baseUrl, `/v1/sessions/${sessionId}/answers`, {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }

  reviseAnswer(
    sessionId: string,
    node: string,
    answer: RawAnswer,
    justification?: string,
  ): Promise<SessionEnvelope> {
    const body: Record<string, unknown> = { node, answer };
    if (justification) {
      body.justification = justification;
    }
    return request(this.baseUrl, `/v1/sessions/${sessionId}/revisions`, {
      method: 'POST',
      body: JSON.stringify(body),
    });
  }

  finalizeSession(sessionId: string): Promise<ReportView> {
    return request(this.baseUrl, `/v1/sessions/${sessionId}/finalize`, { method: 'POST' });
  }

  getReport(sessionId: string): Promise<ReportView> {
    return request(this.baseUrl, `/v1/sessions/${sessionId}/report`);
  }

  // Fire-and-forget: telemetry must never break the wizard.
  sendEvent(event: TelemetryEvent): void {
    void request(this.baseUrl, '/v1/events', {
      method: 'POST',
      body: JSON.stringify(event),
    }).catch(() => undefined);
  }
}
