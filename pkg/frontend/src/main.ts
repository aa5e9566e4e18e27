// Page wiring: the only module that touches the DOM. State lives in
// three variables; every change re-renders the static parts from
// view.ts and re-binds listeners by delegation.

import { ApiClient, type SchemaInfo, type TaskPayload } from "./api.js";
import { applyAction, keyAction, type Action } from "./keyboard.js";
import { validateRecord } from "./schema.js";
import {
  emptyForm,
  formToRecord,
  renderDone,
  renderForm,
  renderProgress,
  renderTask,
  renderViolations,
  type FormState,
} from "./view.js";

const api = new ApiClient("");

let schema: SchemaInfo;
let task: TaskPayload | null = null;
let form: FormState = emptyForm();
let violations: string[] = [];

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node;
}

function annotatorId(): string {
  const stored = window.localStorage.getItem("annotator_id");
  if (stored !== null && stored.trim() !== "") {
    return stored;
  }
  const entered = window.prompt("annotator id") ?? "anonymous";
  window.localStorage.setItem("annotator_id", entered);
  return entered;
}

function render(): void {
  if (task === null) {
    el("task").innerHTML = renderDone();
    el("form").innerHTML = "";
  } else {
    el("task").innerHTML = renderTask(task);
    el("form").innerHTML = renderForm(schema, form);
  }
  el("violations").innerHTML = renderViolations(violations);
}

async function refreshProgress(): Promise<void> {
  el("progress").innerHTML = renderProgress(await api.progress());
}

async function advance(): Promise<void> {
  task = await api.nextTask(annotatorId());
  form = emptyForm();
  violations = [];
  render();
  await refreshProgress();
}

async function submit(): Promise<void> {
  if (task === null) {
    return;
  }
  const record = formToRecord(
    form,
    task.task_id,
    annotatorId(),
    new Date().toISOString(),
  );
  violations = validateRecord(record);
  if (violations.length > 0) {
    render();
    return;
  }
  const result = await api.submit(record);
  if (result.status === 200 || result.status === 409) {
    await advance();
    return;
  }
  violations = result.violations.length > 0 ? result.violations : [result.error ?? "submission failed"];
  render();
}

function dispatch(action: Action | null): void {
  if (action === null) {
    return;
  }
  if (action.kind === "submit") {
    void submit();
    return;
  }
  form = applyAction(form, action);
  violations = [];
  render();
}

function onClick(event: Event): void {
  const target = event.target instanceof Element ? event.target.closest("button") : null;
  if (target === null) {
    return;
  }
  const group = target.getAttribute("data-group");
  const value = target.getAttribute("data-value");
  if (group === "submit") {
    event.preventDefault();
    void submit();
    return;
  }
  if (group === null || value === null || target.hasAttribute("disabled")) {
    return;
  }
  event.preventDefault();
  if (group === "multi") {
    dispatch({ kind: "set_multi", value: value === "true" });
  } else if (group === "validity" || group === "skill" || group === "relation") {
    dispatch({ kind: "set", group, value });
  }
}

function onKey(event: KeyboardEvent): void {
  if (event.target instanceof HTMLInputElement) {
    if (event.key === "Enter") {
      event.preventDefault();
      void submit();
    }
    return;
  }
  const action = keyAction(event.key, form, schema);
  if (action !== null) {
    event.preventDefault();
    dispatch(action);
  }
}

function onInput(event: Event): void {
  if (event.target instanceof HTMLInputElement && event.target.name === "note") {
    form.note = event.target.value;
  }
}

async function start(): Promise<void> {
  schema = await api.schema();
  el("app").addEventListener("click", onClick);
  el("app").addEventListener("input", onInput);
  document.addEventListener("keydown", onKey);
  await advance();
}

void start();
