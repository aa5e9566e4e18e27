// HTML rendering as pure string functions so tests can inspect exactly
// what an annotator would see. Only the fields named here ever reach
// the page; anything extra in a payload is dropped on the floor.

import type { Progress, SchemaInfo, TaskPayload } from "./api.js";

export interface FormState {
  validity: string | null;
  skill: string | null;
  multiSentence: boolean | null;
  relation: string | null;
  note: string;
}

export function emptyForm(): FormState {
  return { validity: null, skill: null, multiSentence: null, relation: null, note: "" };
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function choiceButton(
  group: string,
  value: string,
  label: string,
  selected: boolean,
  enabled: boolean,
  hint: string | null,
): string {
  const pressed = selected ? "true" : "false";
  const disabled = enabled ? "" : " disabled";
  const keyHint = hint === null ? "" : `<kbd>${escapeHtml(hint)}</kbd> `;
  return (
    `<button type="button" data-group="${group}" data-value="${escapeHtml(value)}"` +
    ` aria-pressed="${pressed}"${disabled}>${keyHint}${escapeHtml(label)}</button>`
  );
}

export function renderTask(task: TaskPayload): string {
  const parts: string[] = ['<section class="task">'];
  parts.push(`<p class="context">${escapeHtml(task.context)}</p>`);
  parts.push(`<p class="question">${escapeHtml(task.question)}</p>`);
  if (task.options && task.options.length > 0) {
    parts.push('<ol class="options">');
    task.options.forEach((option, index) => {
      const mark = index === task.correct_index ? ' class="gold"' : "";
      parts.push(`<li${mark}>${escapeHtml(option)}</li>`);
    });
    parts.push("</ol>");
  } else {
    const golds = task.golds.map((g) => `<li>${escapeHtml(g)}</li>`).join("");
    parts.push(`<ul class="golds">${golds}</ul>`);
  }
  parts.push("</section>");
  return parts.join("\n");
}

/** Pretty label for an enum tag, e.g. spatial_temporal -> spatial temporal. */
function pretty(tag: string): string {
  return tag.replace(/_/g, " ");
}

const VALIDITY_KEYS = ["1", "2", "3", "4"];
const SKILL_KEYS = ["q", "w", "e", "r", "t"];
const RELATION_KEYS = ["z", "x", "c", "v"];

export function renderForm(schema: SchemaInfo, form: FormState): string {
  const valid = form.validity === "valid";
  const multi = form.multiSentence === true;
  const parts: string[] = ['<form class="labels">'];

  parts.push('<fieldset data-group="validity"><legend>validity</legend>');
  schema.validity.forEach((value, index) => {
    parts.push(
      choiceButton("validity", value, pretty(value), form.validity === value, true,
        VALIDITY_KEYS[index] ?? null),
    );
  });
  parts.push("</fieldset>");

  parts.push('<fieldset data-group="skill"><legend>skill</legend>');
  schema.skill.forEach((value, index) => {
    parts.push(
      choiceButton("skill", value, pretty(value), form.skill === value, valid,
        SKILL_KEYS[index] ?? null),
    );
  });
  parts.push("</fieldset>");

  parts.push('<fieldset data-group="multi"><legend>needs several sentences</legend>');
  for (const value of [true, false]) {
    parts.push(
      choiceButton("multi", String(value), value ? "yes" : "no",
        form.multiSentence === value, valid, value ? "m" : "n"),
    );
  }
  parts.push("</fieldset>");

  parts.push('<fieldset data-group="relation"><legend>sentence relation</legend>');
  schema.relation.forEach((value, index) => {
    parts.push(
      choiceButton("relation", value, pretty(value), form.relation === value, multi,
        RELATION_KEYS[index] ?? null),
    );
  });
  parts.push("</fieldset>");

  parts.push(
    '<label class="note">note <input name="note" type="text" ' +
      `value="${escapeHtml(form.note)}"></label>`,
  );
  parts.push(
    '<button type="submit" data-group="submit"><kbd>Enter</kbd> submit</button>',
  );
  parts.push("</form>");
  return parts.join("\n");
}

export function renderProgress(progress: Progress): string {
  const done = progress.submitted;
  const total = progress.submitted + progress.remaining;
  return `<p class="progress">${done} of ${total} annotated</p>`;
}

export function renderViolations(violations: string[]): string {
  if (violations.length === 0) {
    return "";
  }
  const items = violations.map((v) => `<li>${escapeHtml(v)}</li>`).join("");
  return `<ul class="violations">${items}</ul>`;
}

export function renderDone(): string {
  return '<p class="done">All tasks are annotated. Thank you.</p>';
}

/**
 * Build the submission from the form, dropping whatever the current
 * validity gates out so stale clicks cannot produce an invalid record.
 */
export function formToRecord(
  form: FormState,
  taskId: string,
  annotator: string,
  timestamp: string,
): Record<string, unknown> {
  const record: Record<string, unknown> = {
    task_id: taskId,
    annotator_id: annotator,
    timestamp,
  };
  if (form.validity !== null) {
    record.validity = form.validity;
  }
  if (form.validity === "valid") {
    if (form.skill !== null) {
      record.skill = form.skill;
    }
    if (form.multiSentence !== null) {
      record.multi_sentence = form.multiSentence;
    }
    if (form.multiSentence === true && form.relation !== null) {
      record.relation = form.relation;
    }
  }
  if (form.note.trim() !== "") {
    record.note = form.note;
  }
  return record;
}
