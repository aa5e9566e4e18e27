// Keyboard shortcuts. Number keys pick validity, letter rows pick the
// gated groups; gated keys do nothing until their group is enabled.

import type { SchemaInfo } from "./api.js";
import type { FormState } from "./view.js";

export type Action =
  | { kind: "set"; group: "validity" | "skill" | "relation"; value: string }
  | { kind: "set_multi"; value: boolean }
  | { kind: "submit" };

const SKILL_ROW = ["q", "w", "e", "r", "t"];
const RELATION_ROW = ["z", "x", "c", "v"];

export function keyAction(
  key: string,
  form: FormState,
  schema: SchemaInfo,
): Action | null {
  if (key === "Enter") {
    return { kind: "submit" };
  }
  const digit = Number.parseInt(key, 10);
  if (digit >= 1 && digit <= schema.validity.length) {
    return { kind: "set", group: "validity", value: schema.validity[digit - 1] };
  }
  const gateValid = form.validity === "valid";
  const skillIndex = SKILL_ROW.indexOf(key);
  if (skillIndex >= 0 && skillIndex < schema.skill.length) {
    return gateValid
      ? { kind: "set", group: "skill", value: schema.skill[skillIndex] }
      : null;
  }
  if (key === "m" || key === "n") {
    return gateValid ? { kind: "set_multi", value: key === "m" } : null;
  }
  const relationIndex = RELATION_ROW.indexOf(key);
  if (relationIndex >= 0 && relationIndex < schema.relation.length) {
    return form.multiSentence === true
      ? { kind: "set", group: "relation", value: schema.relation[relationIndex] }
      : null;
  }
  return null;
}

/** Apply an action, clearing whatever a change gates out. */
export function applyAction(form: FormState, action: Action): FormState {
  if (action.kind === "submit") {
    return form;
  }
  const next: FormState = { ...form };
  if (action.kind === "set_multi") {
    next.multiSentence = action.value;
    if (!action.value) {
      next.relation = null;
    }
    return next;
  }
  if (action.group === "validity") {
    next.validity = action.value;
    if (action.value !== "valid") {
      next.skill = null;
      next.multiSentence = null;
      next.relation = null;
    }
    return next;
  }
  if (action.group === "skill") {
    next.skill = action.value;
    return next;
  }
  next.relation = action.value;
  return next;
}
