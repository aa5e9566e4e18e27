// Thin client for the annotation server HTTP API.

export interface TaskPayload {
  task_id: string;
  style: string;
  context: string;
  question: string;
  golds: string[];
  options?: string[];
  correct_index?: number;
}

export interface Progress {
  remaining: number;
  submitted: number;
  leased: number;
}

export interface SchemaInfo {
  validity: string[];
  skill: string[];
  relation: string[];
  constraints: string[];
}

export interface SubmitResult {
  status: number;
  ok: boolean;
  violations: string[];
  error: string | null;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  async schema(): Promise<SchemaInfo> {
    const response = await fetch(this.url("/api/schema"));
    if (!response.ok) {
      throw new Error(`schema request failed: ${response.status}`);
    }
    return (await response.json()) as SchemaInfo;
  }

  /** Null when every task has been submitted. */
  async nextTask(annotator: string): Promise<TaskPayload | null> {
    const query = new URLSearchParams({ annotator });
    const response = await fetch(this.url(`/api/tasks/next?${query}`));
    if (response.status === 204) {
      return null;
    }
    if (!response.ok) {
      throw new Error(`task request failed: ${response.status}`);
    }
    return (await response.json()) as TaskPayload;
  }

  async progress(): Promise<Progress> {
    const response = await fetch(this.url("/api/progress"));
    if (!response.ok) {
      throw new Error(`progress request failed: ${response.status}`);
    }
    return (await response.json()) as Progress;
  }

  async submit(record: unknown): Promise<SubmitResult> {
    const response = await fetch(this.url("/api/labels"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(record),
    });
    const body = (await response.json().catch(() => ({}))) as {
      ok?: boolean;
      error?: string;
      violations?: string[];
    };
    return {
      status: response.status,
      ok: response.status === 200 && body.ok === true,
      violations: body.violations ?? [],
      error: body.error ?? null,
    };
  }
}
